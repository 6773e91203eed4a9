#include "netgeom/calculus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "netgeom/detail/kernels.hpp"

namespace netgeom {

namespace {

std::span<const double> as_span(const Point& p) { return {p.data(), static_cast<std::size_t>(p.size())}; }

int upper_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

}  // namespace

MetricField::MetricField(Chart chart, const std::vector<std::vector<Expr>>& entries) : chart_(std::move(chart)) {
  const int n = chart_.dim();
  if (static_cast<int>(entries.size()) != n) throw std::invalid_argument("metric: expected " + std::to_string(n) + " rows");
  for (const auto& row : entries)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("metric: expected " + std::to_string(n) + " columns");
  for (const auto& row : entries)
    for (const auto& e : row)
      if (e.max_variable() >= n) throw std::invalid_argument("metric: entry mentions a coordinate outside the chart");
  // center plus two asymmetric interior points
  std::vector<Point> probes(3, chart_.center());
  for (int i = 0; i < n; ++i) {
    const Interval& d = chart_.domain()[i];
    probes[1][i] = d.lo + (0.3 + 0.1 * (i % 3)) * (d.hi - d.lo);
    probes[2][i] = d.lo + (0.8 - 0.15 * (i % 2)) * (d.hi - d.lo);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (entries[i][j].ptr() == entries[j][i].ptr()) continue;
      for (const Point& c : probes) {
        double a = entries[i][j].eval(c), b = entries[j][i].eval(c);
        if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
          throw std::invalid_argument("metric: entries (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") and (" + std::to_string(j) + "," + std::to_string(i) + ") differ");
      }
    }
  upper_.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) upper_.emplace_back(entries[i][j], n);
}

const DiffTable& MetricField::table(int i, int j) const { return upper_[upper_index(i, j, dim())]; }

std::vector<std::vector<Expr>> MetricField::entries() const {
  const int n = dim();
  std::vector<std::vector<Expr>> out(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = entry(i, j);
  return out;
}

MetricField MetricField::with_spd_floor(double floor) const {
  MetricField m = *this;
  m.spd_floor_ = floor;
  return m;
}

MetricField MetricField::with_provenance(std::shared_ptr<const ProductSpec> spec) const {
  MetricField m = *this;
  m.provenance_ = std::move(spec);
  return m;
}

VectorField::VectorField(std::vector<Expr> components, int dim) {
  if (static_cast<int>(components.size()) != dim) throw std::invalid_argument("vector field: wrong component count");
  comps_.reserve(components.size());
  for (auto& c : components) {
    if (c.max_variable() >= dim) throw std::invalid_argument("vector field: component mentions unknown coordinate");
    comps_.emplace_back(std::move(c), dim);
  }
}

VectorField VectorField::coordinate(int index, int dim) {
  std::vector<Expr> c(dim, Expr::constant(0.0));
  c[index] = Expr::constant(1.0);
  return VectorField(std::move(c), dim);
}

VectorField VectorField::constant(const Vector& v) {
  std::vector<Expr> c;
  for (int i = 0; i < v.size(); ++i) c.push_back(Expr::constant(v[i]));
  return VectorField(std::move(c), static_cast<int>(v.size()));
}

Vector VectorField::at(const Point& p) const {
  Vector v(dim());
  for (int k = 0; k < dim(); ++k) v[k] = comps_[k].value(as_span(p));
  return v;
}

Matrix VectorField::jacobian(const Point& p) const {
  Matrix J(dim(), dim());
  for (int k = 0; k < dim(); ++k)
    for (int l = 0; l < dim(); ++l) J(k, l) = comps_[k].d(l).eval(as_span(p));
  return J;
}

MetricAt metric_at(const MetricField& metric, const Point& p) {
  const int n = metric.dim();
  if (p.size() != n) throw std::invalid_argument("metric_at: point dimension mismatch");
  MetricAt out;
  out.g.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = metric.table(i, j).value(as_span(p));
      out.g(i, j) = v;
      out.g(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.g, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  const double max_eig = es.eigenvalues().maxCoeff();
  if (!(out.min_eigenvalue > metric.spd_floor())) {
    std::string where;
    for (int i = 0; i < n; ++i) where += (i ? ", " : "") + format_number(p[i]);
    throw NotSpdError("metric not positive definite at (" + where + "): smallest eigenvalue " +
                          format_number(out.min_eigenvalue),
                      out.min_eigenvalue);
  }
  out.condition = max_eig / out.min_eigenvalue;
  out.ill_conditioned = out.condition > kConditionWarning;
  out.inverse = out.g.ldlt().solve(Matrix::Identity(n, n));
  return out;
}

Christoffel christoffel(const MetricField& metric, const Point& p) {
  metric_at(metric, p);
  auto geo = detail::geometry_double(metric, p);
  Christoffel out(geo.n);
  for (int k = 0; k < geo.n; ++k)
    for (int i = 0; i < geo.n; ++i)
      for (int j = 0; j < geo.n; ++j) out(k, i, j) = geo.G(k, i, j);
  return out;
}

Vector cov_deriv(const MetricField& metric, const VectorField& X, const VectorField& Y, const Point& p) {
  metric_at(metric, p);
  auto geo = detail::geometry_double(metric, p);
  auto x = detail::field_double(X, p);
  auto y = detail::field_double(Y, p);
  return detail::to_eigen(detail::cov_deriv(geo, x.val, y.val, y.D));
}

Vector grad_field(const MetricField& metric, const Expr& f, const Point& p) {
  auto m = metric_at(metric, p);
  DiffTable t(f, metric.dim());
  Jet2 j = t.jet1(as_span(p));
  return m.inverse * j.grad;
}

double hessian_lc(const MetricField& metric, const Expr& f, const Vector& X, const Vector& Y, const Point& p) {
  Matrix H = hessian_lc(metric, f, p);
  return X.dot(H * Y);
}

double hessian_lc(const MetricField& metric, const Expr& f, const VectorField& X, const VectorField& Y,
                  const Point& p) {
  return hessian_lc(metric, f, X.at(p), Y.at(p), p);
}

Matrix hessian_lc(const MetricField& metric, const Expr& f, const Point& p) {
  metric_at(metric, p);
  auto geo = detail::geometry_double(metric, p);
  Jet2 j = eval_jet2(f, p);
  const int n = metric.dim();
  Matrix H = j.hess;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += geo.G(l, i, k) * j.grad[l];
      H(i, k) -= s;
    }
  return H;
}

Vector lie_bracket(const VectorField& X, const VectorField& Y, const Point& p) {
  auto x = detail::field_double(X, p);
  auto y = detail::field_double(Y, p);
  return detail::to_eigen(detail::bracket(x, y));
}

double inner(const MetricField& metric, const Vector& v, const Vector& w, const Point& p) {
  auto m = metric_at(metric, p);
  return v.dot(m.g * w);
}

namespace detail {

Geometry<double> geometry_double(const MetricField& metric, const Point& p) {
  const int n = metric.dim();
  Mat<double> g(n, n);
  std::vector<Mat<double>> dg(n, Mat<double>(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet2 jt = metric.table(i, j).jet1(as_span(p));
      g(i, j) = g(j, i) = jt.value;
      for (int k = 0; k < n; ++k) dg[k](i, j) = dg[k](j, i) = jt.grad[k];
    }
  return make_geometry(g, dg);
}

Geometry<Dual> geometry_dual(const MetricField& metric, const Point& p) {
  const int n = metric.dim();
  Mat<Dual> g(n, n);
  std::vector<Mat<Dual>> dg(n, Mat<Dual>(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet2 jt = metric.table(i, j).jet2(as_span(p));
      g(i, j) = g(j, i) = Dual::seeded(jt.value, jt.grad.data(), n);
      for (int k = 0; k < n; ++k) {
        Dual d(jt.grad[k]);
        for (int l = 0; l < n; ++l) d.d[l] = jt.hess(k, l);
        dg[k](i, j) = dg[k](j, i) = d;
      }
    }
  return make_geometry(g, dg);
}

FieldAt<double> field_double(const VectorField& X, const Point& p) {
  const int n = X.dim();
  FieldAt<double> f{Vec<double>(n), Mat<double>(n, n)};
  for (int k = 0; k < n; ++k) {
    Jet2 jt = X.table(k).jet1(as_span(p));
    f.val[k] = jt.value;
    for (int l = 0; l < n; ++l) f.D(k, l) = jt.grad[l];
  }
  return f;
}

FieldAt<Dual> field_dual(const VectorField& X, const Point& p) {
  const int n = X.dim();
  FieldAt<Dual> f{Vec<Dual>(n), Mat<Dual>(n, n)};
  for (int k = 0; k < n; ++k) {
    Jet2 jt = X.table(k).jet2(as_span(p));
    f.val[k] = Dual::seeded(jt.value, jt.grad.data(), n);
    for (int l = 0; l < n; ++l) {
      Dual d(jt.grad[l]);
      for (int m = 0; m < n; ++m) d.d[m] = jt.hess(l, m);
      f.D(k, l) = d;
    }
  }
  return f;
}

Dual scalar_dual(const DiffTable& f, const Point& p) {
  Jet2 jt = f.jet1(as_span(p));
  return Dual::seeded(jt.value, jt.grad.data(), f.dim());
}

Vec<Dual> gradient_dual(const DiffTable& f, const Point& p) {
  const int n = f.dim();
  Jet2 jt = f.jet2(as_span(p));
  Vec<Dual> out(n);
  for (int l = 0; l < n; ++l) {
    out[l] = Dual(jt.grad[l]);
    for (int m = 0; m < n; ++m) out[l].d[m] = jt.hess(l, m);
  }
  return out;
}

}  // namespace detail

}  // namespace netgeom
