#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "netgeom/chart.hpp"
#include "netgeom/expr.hpp"

namespace netgeom {

struct ProductSpec;

/// Raised when the metric is not symmetric positive definite at a point.
class NotSpdError : public std::runtime_error {
 public:
  NotSpdError(const std::string& msg, double min_eigenvalue)
      : std::runtime_error(msg), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

inline constexpr double kDefaultSpdFloor = 1e-10;
inline constexpr double kConditionWarning = 1e8;

/// Riemannian metric on a chart, one Expr per entry. Only the upper
/// triangle is stored; the constructor rejects inputs whose lower triangle
/// disagrees with it at a few interior probe points.
class MetricField {
 public:
  MetricField(Chart chart, const std::vector<std::vector<Expr>>& entries);

  const Chart& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const Expr& entry(int i, int j) const { return table(i, j).expr(); }
  const DiffTable& table(int i, int j) const;
  std::vector<std::vector<Expr>> entries() const;

  double spd_floor() const { return spd_floor_; }
  MetricField with_spd_floor(double floor) const;

  /// Set when the metric was assembled from a product specification.
  const std::shared_ptr<const ProductSpec>& provenance() const { return provenance_; }
  MetricField with_provenance(std::shared_ptr<const ProductSpec> spec) const;

 private:
  Chart chart_;
  std::vector<DiffTable> upper_;
  double spd_floor_ = kDefaultSpdFloor;
  std::shared_ptr<const ProductSpec> provenance_;
};

/// Vector field with Expr components in the coordinate frame.
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::vector<Expr> components, int dim);
  static VectorField coordinate(int index, int dim);
  static VectorField constant(const Vector& v);

  int dim() const { return static_cast<int>(comps_.size()); }
  const Expr& component(int k) const { return comps_[k].expr(); }
  const DiffTable& table(int k) const { return comps_[k]; }
  Vector at(const Point& p) const;
  /// J(k, l) = d X^k / d x^l
  Matrix jacobian(const Point& p) const;

 private:
  std::vector<DiffTable> comps_;
};

struct MetricAt {
  Matrix g;
  Matrix inverse;
  double min_eigenvalue = 0.0;
  double condition = 1.0;
  bool ill_conditioned = false;
};

/// SPD-checked metric value and inverse.
MetricAt metric_at(const MetricField& g, const Point& p);

/// Christoffel symbols of the second kind, indexed (k, i, j) for Gamma^k_ij.
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double operator()(int k, int i, int j) const { return data_[(k * n_ + i) * n_ + j]; }
  double& operator()(int k, int i, int j) { return data_[(k * n_ + i) * n_ + j]; }

 private:
  int n_;
  std::vector<double> data_;
};

Christoffel christoffel(const MetricField& g, const Point& p);

/// (nabla_X Y)^k = X^i d_i Y^k + Gamma^k_ij X^i Y^j
Vector cov_deriv(const MetricField& g, const VectorField& X, const VectorField& Y, const Point& p);

/// Riemannian gradient g^{kl} d_l f.
Vector grad_field(const MetricField& g, const Expr& f, const Point& p);

/// Covariant Hessian Hess f(X, Y) = X(Y f) - (nabla_X Y) f.
double hessian_lc(const MetricField& g, const Expr& f, const VectorField& X, const VectorField& Y, const Point& p);
double hessian_lc(const MetricField& g, const Expr& f, const Vector& X, const Vector& Y, const Point& p);
/// Full covariant Hessian matrix at p.
Matrix hessian_lc(const MetricField& g, const Expr& f, const Point& p);

Vector lie_bracket(const VectorField& X, const VectorField& Y, const Point& p);

double inner(const MetricField& g, const Vector& v, const Vector& w, const Point& p);

}  // namespace netgeom
