#include "netgeom/product.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netgeom/detail/kernels.hpp"

namespace netgeom {

std::string to_string(ProductKind k) {
  switch (k) {
    case ProductKind::Product: return "product";
    case ProductKind::Warped: return "warped";
    case ProductKind::QuasiWarped: return "quasi-warped";
    case ProductKind::Twisted: return "twisted";
    case ProductKind::Conformal: return "conformal";
  }
  return "?";
}

ProductKind parse_product_kind(const std::string& s) {
  if (s == "product") return ProductKind::Product;
  if (s == "warped") return ProductKind::Warped;
  if (s == "quasi-warped") return ProductKind::QuasiWarped;
  if (s == "twisted") return ProductKind::Twisted;
  if (s == "conformal") return ProductKind::Conformal;
  throw std::invalid_argument("unknown product kind '" + s + "'");
}

int ProductSpec::factor_count() const {
  return kind == ProductKind::Conformal ? inner->factor_count() : static_cast<int>(chart.blocks().size());
}

ProductSpec make_conformal(const ProductSpec& inner, const Expr& phi) {
  ProductSpec s;
  s.kind = ProductKind::Conformal;
  s.inner = std::make_shared<const ProductSpec>(inner);
  s.phi = phi;
  return s;
}

namespace {

bool uses_only(const Expr& e, const std::set<int>& allowed) {
  for (int v : e.variables())
    if (!allowed.count(v)) return false;
  return true;
}

std::set<int> as_set(const IndexSet& s) { return {s.begin(), s.end()}; }

}  // namespace

void check_kind(const ProductSpec& spec) {
  if (spec.kind == ProductKind::Conformal) {
    if (!spec.inner) throw KindError("conformal spec without inner spec");
    check_kind(*spec.inner);
    if (spec.phi.max_variable() >= spec.inner->chart.dim()) throw KindError("phi mentions an unknown coordinate");
    return;
  }
  const auto& blocks = spec.chart.blocks();
  const int k1 = static_cast<int>(blocks.size());
  if (k1 < 2) throw KindError("product spec needs a chart with at least two blocks");
  if (static_cast<int>(spec.factor_metrics.size()) != k1) throw KindError("one factor metric per block expected");
  if (static_cast<int>(spec.twists.size()) != k1) throw KindError("one twist function per block expected");
  for (int i = 0; i < k1; ++i) {
    const auto& fm = spec.factor_metrics[i];
    const std::size_t d = blocks[i].size();
    if (fm.size() != d) throw KindError("factor " + std::to_string(i) + ": metric has wrong size");
    for (const auto& row : fm) {
      if (row.size() != d) throw KindError("factor " + std::to_string(i) + ": metric has wrong size");
      for (const auto& e : row)
        if (!uses_only(e, as_set(blocks[i])))
          throw KindError("factor " + std::to_string(i) + ": metric mentions coordinates outside its block");
    }
    if (spec.twists[i].max_variable() >= spec.chart.dim())
      throw KindError("twist " + std::to_string(i) + " mentions an unknown coordinate");
  }
  const std::string kind = to_string(spec.kind);
  auto fail = [&](int i, const std::string& why) {
    throw KindError(kind + " spec: rho_" + std::to_string(i) + " " + why);
  };
  switch (spec.kind) {
    case ProductKind::Product:
      for (int i = 0; i < k1; ++i)
        if (!spec.twists[i].is_constant(1.0)) fail(i, "must be 1");
      break;
    case ProductKind::Warped:
    case ProductKind::QuasiWarped:
      if (!spec.twists[0].is_constant(1.0)) fail(0, "must be 1");
      for (int i = 1; i < k1; ++i) {
        std::set<int> allowed = as_set(blocks[0]);
        if (spec.kind == ProductKind::QuasiWarped) allowed.insert(blocks[i].begin(), blocks[i].end());
        if (!uses_only(spec.twists[i], allowed))
          fail(i, spec.kind == ProductKind::Warped ? "may only depend on block-0 coordinates"
                                                   : "may only depend on block-0 and block-" + std::to_string(i) +
                                                         " coordinates");
      }
      break;
    default:
      break;
  }
}

ProductSpec as_twisted(const ProductSpec& spec) {
  check_kind(spec);
  if (spec.kind != ProductKind::Conformal) {
    ProductSpec s = spec;
    s.kind = ProductKind::Twisted;
    return s;
  }
  ProductSpec s = as_twisted(*spec.inner);
  for (auto& t : s.twists) t = spec.phi * t;
  return s;
}

MetricField build_metric(const ProductSpec& spec) {
  const ProductSpec tw = as_twisted(spec);
  const Chart& chart = tw.chart;
  const int n = chart.dim();
  std::vector<std::vector<Expr>> e(n, std::vector<Expr>(n, Expr::constant(0.0)));
  for (std::size_t i = 0; i < chart.blocks().size(); ++i) {
    const IndexSet& b = chart.blocks()[i];
    const Expr rho2 = pow(tw.twists[i], 2.0);
    for (std::size_t r = 0; r < b.size(); ++r)
      for (std::size_t c = 0; c < b.size(); ++c) e[b[r]][b[c]] = rho2 * tw.factor_metrics[i][r][c];
  }
  return MetricField(chart, e).with_provenance(std::make_shared<const ProductSpec>(spec));
}

MetricField conformal_scale(const MetricField& g, const Expr& phi, const SamplePlan& plan) {
  for (const Point& p : sample_points(g.chart(), plan)) {
    const double v = phi.eval(p);
    if (!(v > 0.0)) throw std::domain_error("conformal factor is not positive at a sample point (" + format_number(v) + ")");
  }
  const Expr phi2 = pow(phi, 2.0);
  std::vector<std::vector<Expr>> e = g.entries();
  for (auto& row : e)
    for (auto& x : row) x = phi2 * x;
  MetricField out(g.chart(), e);
  if (g.provenance() && g.provenance()->kind != ProductKind::Conformal)
    out = out.with_provenance(std::make_shared<const ProductSpec>(make_conformal(*g.provenance(), phi)));
  return out.with_spd_floor(g.spd_floor());
}

double verify_connection_identity(const ProductSpec& spec, const VectorField& X, const VectorField& Y,
                                  const Point& p) {
  const ProductSpec tw = as_twisted(spec);
  ProductSpec flat = tw;
  for (auto& t : flat.twists) t = Expr::constant(1.0);
  for (std::size_t i = 0; i < tw.twists.size(); ++i) {
    const double r = tw.twists[i].eval(p);
    if (!(r > 0.0)) throw std::domain_error("twist rho_" + std::to_string(i) + " is not positive at p");
  }
  const MetricField g = build_metric(tw);
  const MetricField gt = build_metric(flat);
  const MetricAt m = metric_at(g, p);

  const Vector lhs = cov_deriv(g, X, Y, p);
  Vector rhs = cov_deriv(gt, X, Y, p);
  const Vector x = X.at(p), y = Y.at(p);
  const auto& blocks = tw.chart.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Vector xi = Vector::Zero(x.size()), yi = Vector::Zero(y.size());
    for (int a : blocks[i]) {
      xi[a] = x[a];
      yi[a] = y[a];
    }
    const Vector U = -grad_field(g, log(tw.twists[i]), p);
    rhs += xi.dot(m.g * yi) * U - x.dot(m.g * U) * yi - y.dot(m.g * U) * xi;
  }
  const Vector d = lhs - rhs;
  return std::sqrt(std::max(0.0, d.dot(m.g * d)));
}

double separability_residual(const Expr& rho, const IndexSet& block_a, const IndexSet& block_b, const Point& p) {
  const Jet2 j = eval_jet2(rho, p);
  if (!(j.value > 0.0)) throw std::domain_error("separability_residual: rho is not positive at p");
  double worst = 0.0;
  for (int a : block_a)
    for (int b : block_b) {
      const double v = j.hess(a, b) / j.value - j.grad[a] * j.grad[b] / (j.value * j.value);
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// factorization

namespace {

/// Block j of the metric and its log-determinant derivatives.
class BlockData {
 public:
  BlockData(const MetricField& g, IndexSet block) : g_(g), block_(std::move(block)) {}

  Matrix at(const Point& p) const {
    const int d = static_cast<int>(block_.size());
    Matrix G(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) G(r, c) = g_.entry(block_[r], block_[c]).eval(p);
    return G;
  }

  double log_det(const Point& p) const {
    const Eigen::LLT<Matrix> llt(at(p));
    if (llt.info() != Eigen::Success) throw FactorizationError("block metric is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  /// d_b log det G_j = tr(G^{-1} d_b G)
  double dlog_det(const Point& p, int b) const {
    const int d = static_cast<int>(block_.size());
    Matrix dG(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) dG(r, c) = g_.table(block_[r], block_[c]).d(b).eval(p);
    return at(p).ldlt().solve(dG).trace();
  }

  int size() const { return static_cast<int>(block_.size()); }
  const IndexSet& indices() const { return block_; }

 private:
  const MetricField& g_;
  IndexSet block_;
};

Point mix(const Point& x, const Point& base, const IndexSet& keep) {
  Point y = base;
  for (int a : keep) y[a] = x[a];
  return y;
}

bool contains(const IndexSet& s, int a) { return std::find(s.begin(), s.end(), a) != s.end(); }

}  // namespace

Factorization factorize_cwp(const MetricField& g, const FactorizeOptions& opt) {
  const Chart& chart = g.chart();
  if (!chart.is_product()) throw FactorizationError("factorize: chart carries no block partition");
  const auto& blocks = chart.blocks();
  const int n = chart.dim();
  const int k = static_cast<int>(blocks.size()) - 1;

  const OrthogonalNet net = OrthogonalNet::coordinate(chart, blocks);
  const NetReport rep = classify_net(g, net, opt.precondition_samples, opt.tolerance);
  if (rep.flag("CWP").verdict != Verdict::Holds)
    throw FactorizationError("CWP precondition fails (max residual " + format_number(rep.flag("CWP").max_residual) +
                             ")");

  Factorization out;
  out.base = opt.base ? *opt.base : chart.center();
  if (out.base.size() != n || !chart.contains(out.base)) throw FactorizationError("base point outside the chart");
  const Point& base = out.base;

  for (int a = 0; a < n; ++a) {
    const Interval& iv = chart.domain()[a];
    const double w = iv.hi - iv.lo, lo = iv.lo + opt.margin * w, hi = iv.hi - opt.margin * w;
    std::vector<double> ax;
    for (int j = 0; j < opt.grid; ++j) ax.push_back(opt.grid == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * j / (opt.grid - 1));
    out.axes.push_back(std::move(ax));
  }
  {
    std::vector<int> idx(n, 0);
    for (;;) {
      Point p(n);
      for (int a = 0; a < n; ++a) p[a] = out.axes[a][idx[a]];
      out.points.push_back(p);
      int a = n - 1;
      while (a >= 0 && ++idx[a] == opt.grid) idx[a--] = 0;
      if (a < 0) break;
    }
  }

  std::vector<BlockData> bd;
  for (const auto& b : blocks) bd.emplace_back(g, b);

  // rho^_j(x) = rho_j(x) / rho_j(x_{B_j}, base elsewhere), from block determinants
  auto log_rho_hat = [&](int j, const Point& x) {
    return (bd[j].log_det(x) - bd[j].log_det(mix(x, base, blocks[j]))) / (2.0 * bd[j].size());
  };
  auto dlog_rho_hat = [&](int j, const Point& x, int b) {
    double v = bd[j].dlog_det(x, b);
    if (contains(blocks[j], b)) v -= bd[j].dlog_det(mix(x, base, blocks[j]), b);
    return v / (2.0 * bd[j].size());
  };
  auto dlog_rho_tilde = [&](int i, const Point& x, int b) { return dlog_rho_hat(i, x, b) - dlog_rho_hat(0, x, b); };

  // integral of d log rho~_i along axis legs through the coordinates of `leg`, from `from` to `to`
  auto integrate_legs = [&](int i, Point from, const Point& to, const IndexSet& leg) {
    double total = 0.0;
    for (int b : leg) {
      Point cur = from;
      total += romberg(
          [&](double t) {
            cur[b] = t;
            return dlog_rho_tilde(i, cur, b);
          },
          from[b], to[b]);
      from[b] = to[b];
    }
    return total;
  };

  const std::size_t npts = out.points.size();
  out.phi.resize(npts);
  for (std::size_t q = 0; q < npts; ++q) out.phi[q] = std::exp(log_rho_hat(0, out.points[q]));

  try {
    for (int i = 1; i <= k; ++i) {
      const double log_c = log_rho_hat(i, base) - log_rho_hat(0, base);
      out.rho_tilde_base.push_back(std::exp(log_c));
      const IndexSet both = [&] {
        IndexSet s = blocks[0];
        s.insert(s.end(), blocks[i].begin(), blocks[i].end());
        return s;
      }();
      // two paths from base to each (x_0, x_i) with other blocks at base
      std::map<std::vector<double>, double> A0, Bi;
      auto key = [](const Point& x, const IndexSet& s) {
        std::vector<double> v;
        for (int a : s) v.push_back(x[a]);
        return v;
      };
      for (const Point& x : out.points) {
        const Point p0 = mix(x, base, blocks[0]);
        const Point pi = mix(x, base, blocks[i]);
        auto k0 = key(x, blocks[0]), ki = key(x, blocks[i]);
        if (!A0.count(k0)) A0[k0] = integrate_legs(i, base, p0, blocks[0]);
        if (!Bi.count(ki)) Bi[ki] = integrate_legs(i, base, pi, blocks[i]);
      }
      std::map<std::vector<double>, bool> checked;
      for (const Point& x : out.points) {
        auto kb = key(x, both);
        if (checked.count(kb)) continue;
        checked[kb] = true;
        const Point target = mix(x, base, both);
        const double pathA = A0[key(x, blocks[0])] + integrate_legs(i, mix(x, base, blocks[0]), target, blocks[i]);
        const double pathB = Bi[key(x, blocks[i])] + integrate_legs(i, mix(x, base, blocks[i]), target, blocks[0]);
        out.path_order_residual = std::max(out.path_order_residual, std::abs(pathA - pathB));
      }
      std::vector<double> psi(npts), phf(npts), rt(npts);
      for (std::size_t q = 0; q < npts; ++q) {
        const Point& x = out.points[q];
        psi[q] = std::exp(A0[key(x, blocks[0])]);
        phf[q] = std::exp(Bi[key(x, blocks[i])]);
        rt[q] = std::exp(log_c) * psi[q] * phf[q];
      }
      out.psi.push_back(std::move(psi));
      out.phi_factor.push_back(std::move(phf));
      out.rho_tilde.push_back(std::move(rt));
    }
  } catch (const std::runtime_error& e) {
    throw FactorizationError(std::string("line integration failed: ") + e.what());
  }
  if (out.path_order_residual > opt.path_tolerance)
    throw FactorizationError("path-order inconsistency " + format_number(out.path_order_residual) +
                             ": the splitting gradient is not integrable");

  // rebuild phi^2 (g_0(x_0) + sum rho~_i^2 g_i(x_i)), factor metrics read at base elsewhere
  for (std::size_t q = 0; q < npts; ++q) {
    const Point& x = out.points[q];
    const MetricAt m = metric_at(g, x);
    Matrix rebuilt = Matrix::Zero(n, n);
    for (int j = 0; j <= k; ++j) {
      const Matrix Gj = bd[j].at(mix(x, base, blocks[j]));
      const double s = j == 0 ? 1.0 : out.rho_tilde[j - 1][q] * out.rho_tilde[j - 1][q];
      for (int r = 0; r < bd[j].size(); ++r)
        for (int c = 0; c < bd[j].size(); ++c) rebuilt(blocks[j][r], blocks[j][c]) = out.phi[q] * out.phi[q] * s * Gj(r, c);
    }
    out.reconstruction_error = std::max(out.reconstruction_error, (rebuilt - m.g).norm() / m.g.norm());
  }

  if (rep.holds("CP")) {
    out.conformal_product = true;
    out.cp_constants.push_back(1.0);
    for (int i = 2; i <= k; ++i) {
      double mean = 0.0;
      for (std::size_t q = 0; q < npts; ++q)
        mean += std::log(out.rho_tilde_base[i - 1] * out.psi[i - 1][q]) - std::log(out.rho_tilde_base[0] * out.psi[0][q]);
      mean /= static_cast<double>(npts);
      for (std::size_t q = 0; q < npts; ++q) {
        const double r = std::log(out.rho_tilde_base[i - 1] * out.psi[i - 1][q]) -
                         std::log(out.rho_tilde_base[0] * out.psi[0][q]) - mean;
        out.cp_fit_residual = std::max(out.cp_fit_residual, std::abs(r));
      }
      out.cp_constants.push_back(std::exp(mean));
    }
    out.cp_phi.resize(npts);
    for (std::size_t q = 0; q < npts; ++q) out.cp_phi[q] = out.phi[q] * out.rho_tilde_base[0] * out.psi[0][q];
  }

  if (const auto& prov = g.provenance()) {
    const ProductSpec tw = as_twisted(*prov);
    out.phi_closed = tw.twists[0];
    for (int i = 1; i <= k; ++i) out.rho_tilde_closed.push_back(tw.twists[i] / tw.twists[0]);
  }
  return out;
}

// ---------------------------------------------------------------------------

SphericalCheck spherical_factor_check(const ProductSpec& spec, const Expr& phi, int i, const Point& p) {
  check_kind(spec);
  if (spec.kind != ProductKind::Warped && spec.kind != ProductKind::Product)
    throw KindError("spherical_factor_check expects a warped (or product) spec");
  const double phiv = phi.eval(p);
  if (!(phiv > 0.0)) throw std::domain_error("spherical_factor_check: phi is not positive at p");

  const Chart& chart = spec.chart;
  const int n = chart.dim();
  const IndexSet& Bi = chart.blocks().at(i);
  const IndexSet perp = complement(Bi, n);
  const MetricField g = conformal_scale(build_metric(spec), phi, SamplePlan{1, 0.0, 0, 0});

  const auto geo = detail::geometry_dual(g, p);
  detail::Geometry<double> geod;
  geod.n = n;
  geod.g = detail::values(geo.g);
  geod.ginv = detail::values(geo.ginv);
  for (const auto& x : geo.gamma) geod.gamma.push_back(x.v);

  // W = -grad log phi as a Dual field, then nabla W
  const DiffTable logphi(log(phi), n);
  const auto dlog = detail::gradient_dual(logphi, p);
  auto W = detail::apply(geo.ginv, dlog);
  for (auto& w : W) w = -w;
  const auto Wv = detail::values(W);
  const auto DW = detail::jacobian(W, n);

  const Matrix hess = hessian_lc(g, phi, p);
  auto e = [n](int a) {
    detail::Vec<double> v(n, 0.0);
    v[a] = 1.0;
    return v;
  };

  SphericalCheck out;
  for (int a : Bi)
    for (int c : perp) {
      const double na = std::sqrt(geod.g(a, a)), nc = std::sqrt(geod.g(c, c));
      const auto dW = detail::cov_deriv(geod, e(c), Wv, DW);
      const double ii = detail::inner(geod.g, dW, e(a)) - detail::inner(geod.g, e(c), Wv) * detail::inner(geod.g, e(a), Wv);
      out.residual_ii = std::max(out.residual_ii, std::abs(ii) / (na * nc));
      out.residual_iii = std::max(out.residual_iii, std::abs(hess(a, c)) / (na * nc));
    }

  const Expr inv_phi = 1.0 / phi;
  for (int a : Bi) {
    const Expr q = diff(inv_phi, a) / spec.twists.at(i);
    for (int b : perp) out.residual_v = std::max(out.residual_v, std::abs(diff(q, b).eval(p)));
  }
  return out;
}

}  // namespace netgeom
