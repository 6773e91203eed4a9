#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "netgeom/expr.hpp"

namespace netgeom {

/// Seeded generator of smooth expressions that are finite on [-2, 2]^n.
class ExprGenerator {
 public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  int integer(int lo, int hi);  // inclusive

  /// Random smooth expression in the given variables.
  Expr smooth(const std::vector<int>& vars, int depth);
  /// exp(scale * sin(smooth + coupling)): positive, bounded away from zero,
  /// and jointly dependent on all of `vars`.
  Expr positive(const std::vector<int>& vars, int depth, double scale = 0.4);

 private:
  Expr leaf(const std::vector<int>& vars);
  std::mt19937_64 rng_;
};

}  // namespace netgeom
