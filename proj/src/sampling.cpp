#include "netgeom/sampling.hpp"

#include <random>
#include <stdexcept>

namespace netgeom {

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<Point> sample_points(const Chart& chart, const SamplePlan& plan) {
  const int n = chart.dim();
  if (plan.grid < 0 || plan.random < 0) throw std::invalid_argument("sampling: negative point count");
  if (!(plan.margin >= 0.0 && plan.margin < 0.5)) throw std::invalid_argument("sampling: margin must lie in [0, 0.5)");
  Vector lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const Interval& iv = chart.domain()[i];
    const double w = iv.hi - iv.lo;
    lo[i] = iv.lo + plan.margin * w;
    hi[i] = iv.hi - plan.margin * w;
  }

  std::vector<Point> pts;
  if (plan.grid > 0) {
    std::vector<int> idx(n, 0);
    for (;;) {
      Point p(n);
      for (int i = 0; i < n; ++i)
        p[i] = plan.grid == 1 ? 0.5 * (lo[i] + hi[i]) : lo[i] + (hi[i] - lo[i]) * idx[i] / (plan.grid - 1);
      pts.push_back(p);
      int k = n - 1;
      while (k >= 0 && ++idx[k] == plan.grid) idx[k--] = 0;
      if (k < 0) break;
    }
  }

  std::mt19937_64 rng(plan.seed);
  for (int r = 0; r < plan.random; ++r) {
    Point p(n);
    for (int i = 0; i < n; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * unit_uniform(rng());
    pts.push_back(p);
  }
  if (pts.empty()) throw std::invalid_argument("sampling produced no interior points");
  return pts;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "pass";
    case Verdict::Fails: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

Verdict verdict_of(double residual, double tol) {
  if (residual <= tol) return Verdict::Holds;
  if (residual > 10.0 * tol || !(residual == residual)) return Verdict::Fails;
  return Verdict::Inconclusive;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::NotApplicable) return b;
  if (b == Verdict::NotApplicable) return a;
  if (a == Verdict::Fails || b == Verdict::Fails) return Verdict::Fails;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Holds;
}

}  // namespace netgeom
