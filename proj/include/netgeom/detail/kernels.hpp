#pragma once

// Pointwise geometry kernels, templated on the scalar so the same formulas
// run on plain doubles and on Dual jets.

#include <algorithm>
#include <cmath>
#include <span>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/dual.hpp"

namespace netgeom::detail {

template <class T>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0.0)) {}
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

template <class T>
using Vec = std::vector<T>;

template <class T>
Mat<T> matmul(const Mat<T>& x, const Mat<T>& y) {
  Mat<T> out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const T& xik = x(i, k);
      for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

template <class T>
Mat<T> transpose(const Mat<T>& x) {
  Mat<T> out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

template <class T>
Vec<T> apply(const Mat<T>& m, const Vec<T>& v) {
  Vec<T> out(m.rows, T(0.0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
  return out;
}

/// Gauss-Jordan inverse with partial pivoting on the value part.
template <class T>
Mat<T> inverse(Mat<T> m) {
  const int n = m.rows;
  Mat<T> inv = Mat<T>::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(m(r, c))) > std::abs(value_of(m(piv, c)))) piv = r;
    if (value_of(m(piv, c)) == 0.0) throw std::runtime_error("singular matrix");
    if (piv != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    const T p = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) = m(c, j) / p;
      inv(c, j) = inv(c, j) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = m(r, c);
      if (value_of(f) == 0.0 && std::is_same_v<T, double>) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) = m(r, j) - f * m(c, j);
        inv(r, j) = inv(r, j) - f * inv(c, j);
      }
    }
  }
  return inv;
}

template <class T>
T inner(const Mat<T>& g, const Vec<T>& v, const Vec<T>& w) {
  T acc(0.0);
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j) acc += v[i] * g(i, j) * w[j];
  return acc;
}

inline double norm(const Mat<double>& g, const Vec<double>& v) { return std::sqrt(std::max(0.0, inner(g, v, v))); }

template <class T>
Vec<T> axpy(const Vec<T>& x, const T& s, const Vec<T>& y) {  // x + s*y
  Vec<T> out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += s * y[i];
  return out;
}

template <class T>
Vec<T> sub(const Vec<T>& x, const Vec<T>& y) {
  Vec<T> out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] -= y[i];
  return out;
}

inline Vec<double> values(const Vec<Dual>& v) {
  Vec<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].v;
  return out;
}

inline Mat<double> values(const Mat<Dual>& m) {
  Mat<double> out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) out.a[i] = m.a[i].v;
  return out;
}

/// Jacobian of a Dual vector: J(k, l) = d v^k / d x^l.
inline Mat<double> jacobian(const Vec<Dual>& v, int n) {
  Mat<double> out(static_cast<int>(v.size()), n);
  for (std::size_t k = 0; k < v.size(); ++k)
    for (int l = 0; l < n; ++l) out(static_cast<int>(k), l) = v[k].d[l];
  return out;
}

inline Vec<double> to_vec(const Vector& v) { return Vec<double>(v.data(), v.data() + v.size()); }
inline Vector to_eigen(const Vec<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }
inline Matrix to_eigen(const Mat<double>& m) {
  Matrix out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  return out;
}
inline Mat<double> from_eigen(const Matrix& m) {
  Mat<double> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) = m(i, j);
  return out;
}

/// Metric, inverse and Christoffel symbols at a point.
template <class T>
struct Geometry {
  int n = 0;
  Mat<T> g, ginv;
  std::vector<T> gamma;  // (k, i, j) -> Gamma^k_ij
  const T& G(int k, int i, int j) const { return gamma[(k * n + i) * n + j]; }
};

/// Vector field at a point: values and coordinate partials D(k, l) = d_l X^k.
template <class T>
struct FieldAt {
  Vec<T> val;
  Mat<T> D;
};

template <class T>
Geometry<T> make_geometry(const Mat<T>& g, const std::vector<Mat<T>>& dg) {
  Geometry<T> geo;
  geo.n = g.rows;
  const int n = geo.n;
  geo.g = g;
  geo.ginv = inverse(g);
  geo.gamma.assign(static_cast<std::size_t>(n) * n * n, T(0.0));
  // first-kind symbols [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<T> first(static_cast<std::size_t>(n) * n * n, T(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        T v = T(0.5) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        first[(i * n + j) * n + l] = v;
        first[(j * n + i) * n + l] = v;
      }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        T acc(0.0);
        for (int l = 0; l < n; ++l) acc += geo.ginv(k, l) * first[(i * n + j) * n + l];
        geo.gamma[(k * n + i) * n + j] = acc;
        geo.gamma[(k * n + j) * n + i] = acc;
      }
  return geo;
}

/// Geometry on doubles from first partials of the metric entries.
Geometry<double> geometry_double(const MetricField& metric, const Point& p);
/// Geometry on Dual jets from first and second partials of the metric entries.
Geometry<Dual> geometry_dual(const MetricField& metric, const Point& p);

FieldAt<double> field_double(const VectorField& X, const Point& p);
FieldAt<Dual> field_dual(const VectorField& X, const Point& p);

/// Scalar at p as a Dual (value, gradient).
Dual scalar_dual(const DiffTable& f, const Point& p);
/// Gradient of f as a Dual vector (each partial carries its Hessian row).
Vec<Dual> gradient_dual(const DiffTable& f, const Point& p);

template <class T>
Vec<T> cov_deriv(const Geometry<T>& geo, const Vec<T>& X, const Vec<T>& Yval, const Mat<T>& DY) {
  const int n = geo.n;
  Vec<T> out(n, T(0.0));
  for (int k = 0; k < n; ++k) {
    T acc(0.0);
    for (int l = 0; l < n; ++l) acc += X[l] * DY(k, l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += geo.G(k, i, j) * X[i] * Yval[j];
    out[k] = acc;
  }
  return out;
}

template <class T>
Vec<T> bracket(const FieldAt<T>& X, const FieldAt<T>& Y) {
  const int n = static_cast<int>(X.val.size());
  Vec<T> out(n, T(0.0));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) out[k] += X.val[l] * Y.D(k, l) - Y.val[l] * X.D(k, l);
  return out;
}

/// g-orthogonal projector onto span of the given columns: F (F^T g F)^{-1} F^T g.
template <class T>
Mat<T> projector(const Mat<T>& g, const std::vector<Vec<T>>& cols) {
  const int n = g.rows;
  const int r = static_cast<int>(cols.size());
  if (r == 0) return Mat<T>(n, n);
  Mat<T> F(n, r);
  for (int c = 0; c < r; ++c)
    for (int i = 0; i < n; ++i) F(i, c) = cols[c][i];
  Mat<T> gram = matmul(transpose(F), matmul(g, F));
  Mat<T> P = matmul(F, matmul(inverse(gram), matmul(transpose(F), g)));
  return P;
}

/// Raises an index with the inverse metric: (g^{-1} w)^k.
template <class T>
Vec<T> raise(const Geometry<T>& geo, const Vec<T>& covector) {
  return apply(geo.ginv, covector);
}

}  // namespace netgeom::detail
