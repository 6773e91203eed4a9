#pragma once

#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "netgeom/calculus.hpp"
#include "netgeom/parser.hpp"

namespace testing {

using namespace netgeom;

inline Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

inline Chart chart(std::vector<std::string> names, std::vector<Interval> dom) {
  return Chart(std::move(names), std::move(dom));
}

inline MetricField metric(const Chart& c, const std::vector<std::vector<std::string>>& rows,
                          const FunctionTable& fns = {}) {
  std::vector<std::vector<Expr>> e;
  for (const auto& r : rows) {
    e.emplace_back();
    for (const auto& s : r) e.back().push_back(parse_expr(s, c, fns));
  }
  return MetricField(c, e);
}

inline MetricField diag_metric(const Chart& c, const std::vector<std::string>& d) {
  std::vector<std::vector<std::string>> rows(d.size(), std::vector<std::string>(d.size(), "0"));
  for (std::size_t i = 0; i < d.size(); ++i) rows[i][i] = d[i];
  return metric(c, rows);
}

inline VectorField field(const Chart& c, const std::vector<std::string>& comps) {
  std::vector<Expr> e;
  for (const auto& s : comps) e.push_back(parse_expr(s, c));
  return VectorField(e, c.dim());
}

// Fixture metrics shared across suites.
inline Chart polar_chart() { return chart({"t", "th"}, {{0.5, 2.5}, {0.0, 3.0}}); }
inline MetricField polar() { return diag_metric(polar_chart(), {"1", "t^2"}); }

inline Chart torus_chart() { return chart({"u", "v"}, {{0.1, 2.5}, {0.0, 3.0}}); }
inline MetricField torus() { return diag_metric(torus_chart(), {"1", "(2 + cos(u))^2"}); }

inline Chart plane_chart() { return chart({"x0", "x1"}, {{-1.0, 1.0}, {-1.0, 1.0}}); }
inline MetricField euclidean() { return diag_metric(plane_chart(), {"1", "1"}); }
inline MetricField conformal_flat() { return diag_metric(plane_chart(), {"exp(2*(x0 + x1))", "exp(2*(x0 + x1))"}); }

}  // namespace testing
