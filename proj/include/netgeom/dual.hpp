#pragma once

#include <array>
#include <cmath>

#include "netgeom/chart.hpp"

namespace netgeom {

/// First-order jet of a derived quantity: value plus coordinate partials.
///
/// Input fields get their partials from symbolic differentiation; Dual only
/// carries them through the algebra that builds derived fields (inverse
/// metrics, projections, mean curvature normals) so that those can be
/// differentiated once more without finite differences.
struct Dual {
  double v = 0.0;
  std::array<double, kMaxDim> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  static Dual seeded(double value, const double* grad, int n) {
    Dual out(value);
    for (int i = 0; i < n; ++i) out.d[i] = grad[i];
    return out;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < kMaxDim; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < kMaxDim; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < kMaxDim; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int i = 0; i < kMaxDim; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) {
  Dual out;
  out.v = -a.v;
  for (int i = 0; i < kMaxDim; ++i) out.d[i] = -a.d[i];
  return out;
}

inline Dual sqrt(const Dual& a) {
  Dual out(std::sqrt(a.v));
  const double s = 0.5 / out.v;
  for (int i = 0; i < kMaxDim; ++i) out.d[i] = s * a.d[i];
  return out;
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace netgeom
