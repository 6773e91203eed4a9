#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/nets.hpp"
#include "netgeom/sampling.hpp"

namespace netgeom {

enum class ProductKind { Product, Warped, QuasiWarped, Twisted, Conformal };

std::string to_string(ProductKind k);
/// Accepts "product", "warped", "quasi-warped", "twisted", "conformal".
ProductKind parse_product_kind(const std::string& s);

/// Raised when a specification violates the syntactic constraints of its kind.
class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Twisted-type metric sum_i rho_i^2 <,>_i on a product chart. Factor
/// metrics are written in the product chart's coordinate names but may only
/// mention their own block. Conformal specs wrap an inner spec and a factor
/// phi; their own factor metrics and twists are unused.
struct ProductSpec {
  ProductKind kind = ProductKind::Twisted;
  Chart chart;  // must carry blocks
  std::vector<std::vector<std::vector<Expr>>> factor_metrics;
  std::vector<Expr> twists;
  std::shared_ptr<const ProductSpec> inner;
  Expr phi;

  int factor_count() const;
  const Chart& product_chart() const { return kind == ProductKind::Conformal ? inner->product_chart() : chart; }
};

ProductSpec make_conformal(const ProductSpec& inner, const Expr& phi);

/// Throws KindError unless the kind's constraints hold.
void check_kind(const ProductSpec& spec);

/// Same metric written as a twisted spec (conformal factor folded into the twists).
ProductSpec as_twisted(const ProductSpec& spec);

/// Block-diagonal metric; records the spec as provenance.
MetricField build_metric(const ProductSpec& spec);

/// phi^2 g. Throws std::domain_error if phi <= 0 at any sample of `plan`.
MetricField conformal_scale(const MetricField& g, const Expr& phi, const SamplePlan& plan = {});

/// |nabla_X Y - (nabla~_X Y + sum_i (<X^i,Y^i> U_i - <X,U_i> Y^i - <Y,U_i> X^i))|_g
/// with U_i = -grad log rho_i and nabla~ the connection of the untwisted metric.
double verify_connection_identity(const ProductSpec& spec, const VectorField& X, const VectorField& Y, const Point& p);

/// max |d_a d_b log rho| over a in block_a, b in block_b.
double separability_residual(const Expr& rho, const IndexSet& block_a, const IndexSet& block_b, const Point& p);

/// Composite trapezoid with Richardson extrapolation; stops once successive
/// diagonal estimates differ by less than `tol`.
template <class F>
double romberg(F&& f, double a, double b, double tol = 1e-10, int max_level = 18);

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FactorizeOptions {
  int grid = 9;
  double margin = 0.1;
  std::optional<Point> base;  // defaults to the chart center
  double tolerance = 1e-8;    // for the CWP precondition
  double path_tolerance = 1e-7;
  SamplePlan precondition_samples{};
};

/// Grid-sampled conformal warped factorization
///   g = phi^2 (g_0 + sum_i rho~_i^2 g_i),  rho~_i = c_i psi~_i(x_0) phi~_i(x_i).
struct Factorization {
  std::vector<std::vector<double>> axes;  // grid values per coordinate
  std::vector<Point> points;              // full grid, last coordinate fastest
  Point base;
  std::vector<double> phi;                     // per grid point
  std::vector<std::vector<double>> rho_tilde;  // [i-1][point], i = 1..k
  std::vector<double> rho_tilde_base;          // c_i = rho~_i(base)
  std::vector<std::vector<double>> psi;        // [i-1][point] psi~_i(x_0)
  std::vector<std::vector<double>> phi_factor; // [i-1][point] phi~_i(x_i)
  double reconstruction_error = 0.0;
  double path_order_residual = 0.0;

  bool conformal_product = false;
  std::vector<double> cp_constants;  // a_i, with a_1 = 1
  double cp_fit_residual = 0.0;
  std::vector<double> cp_phi;        // conformal factor phi * c_1 psi~_1

  std::optional<Expr> phi_closed;  // present when the input carried provenance
  std::vector<Expr> rho_tilde_closed;
};

Factorization factorize_cwp(const MetricField& g, const FactorizeOptions& opt = {});

struct SphericalCheck {
  double residual_ii = 0.0;
  double residual_iii = 0.0;
  double residual_v = 0.0;
};

/// Structure residuals of a conformal factor phi on top of a warped spec,
/// evaluated for block i at p on the metric phi^2 build_metric(spec).
SphericalCheck spherical_factor_check(const ProductSpec& spec, const Expr& phi, int i, const Point& p);

// ---------------------------------------------------------------------------

template <class F>
double romberg(F&& f, double a, double b, double tol, int max_level) {
  if (a == b) return 0.0;
  std::vector<double> prev, cur;
  double h = b - a;
  double trap = 0.5 * h * (f(a) + f(b));
  prev.push_back(trap);
  int pieces = 1;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double sum = 0.0;
    for (int j = 0; j < pieces; ++j) sum += f(a + (2 * j + 1) * h);
    pieces *= 2;
    cur.assign(level + 1, 0.0);
    cur[0] = 0.5 * prev[0] + h * sum;
    double factor = 1.0;
    for (int m = 1; m <= level; ++m) {
      factor *= 4.0;
      cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
    }
    if (level >= 3 && std::abs(cur[level] - prev[level - 1]) < tol) return cur[level];
    prev.swap(cur);
  }
  throw std::runtime_error("romberg: no convergence");
}

}  // namespace netgeom
