#include "netgeom/random_expr.hpp"

#include <cmath>

#include "netgeom/sampling.hpp"

namespace netgeom {

double ExprGenerator::uniform(double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng_()); }

int ExprGenerator::integer(int lo, int hi) {
  return lo + static_cast<int>(unit_uniform(rng_()) * (hi - lo + 1));
}

Expr ExprGenerator::leaf(const std::vector<int>& vars) {
  if (vars.empty() || integer(0, 3) == 0) return Expr::constant(std::round(uniform(-2.0, 2.0) * 4.0) / 4.0);
  const Expr v = Expr::variable(vars[integer(0, static_cast<int>(vars.size()) - 1)]);
  return integer(0, 1) ? v : std::round(uniform(0.25, 1.5) * 4.0) / 4.0 * v;
}

Expr ExprGenerator::smooth(const std::vector<int>& vars, int depth) {
  if (depth <= 0) return leaf(vars);
  const Expr a = smooth(vars, depth - 1);
  switch (integer(0, 10)) {
    case 0: return a + smooth(vars, depth - 1);
    case 1: return a - smooth(vars, depth - 1);
    case 2: return a * smooth(vars, depth - 1);
    case 3: return sin(a);
    case 4: return cos(a);
    case 5: return exp(0.5 * sin(a));
    case 6: return log(1.5 + sin(a));
    case 7: return sqrt(1.0 + pow(a, 2.0));
    case 8: return a / (2.0 + cos(smooth(vars, depth - 1)));
    case 9: return sinh(0.5 * sin(a)) + cosh(0.5 * cos(a));
    default: return pow(sin(a) + 2.0, static_cast<double>(integer(-2, 3)));
  }
}

Expr ExprGenerator::positive(const std::vector<int>& vars, int depth, double scale) {
  // the product term makes the result depend jointly on every listed variable
  Expr mix = Expr::constant(uniform(0.3, 0.8));
  for (int v : vars) mix = mix * (Expr::variable(v) + uniform(0.3, 0.8));
  return exp(scale * sin(smooth(vars, depth) + mix));
}

}  // namespace netgeom
