#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netgeom/chart.hpp"

namespace netgeom {

struct SamplePlan {
  int grid = 5;          // points per axis
  double margin = 0.1;   // fraction of each interval trimmed at both ends
  int random = 16;       // extra uniform interior points
  std::uint64_t seed = 20240611;
};

/// Tensor grid over the trimmed box followed by seeded random points.
/// Throws std::invalid_argument for a plan that yields no points.
std::vector<Point> sample_points(const Chart& chart, const SamplePlan& plan);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits);

enum class Verdict { Holds, Fails, Inconclusive, NotApplicable };

std::string to_string(Verdict v);

/// Holds when r <= tol, fails when r > 10 tol, inconclusive in between.
Verdict verdict_of(double residual, double tol);

/// Combines verdicts across samples: any failure fails, then any
/// inconclusive, then holds. NotApplicable entries are ignored unless all are.
Verdict combine(Verdict a, Verdict b);

}  // namespace netgeom
