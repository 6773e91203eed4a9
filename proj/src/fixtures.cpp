#include "netgeom/fixtures.hpp"

#include "netgeom/parser.hpp"

namespace netgeom::fixtures {

namespace {

Named diag(std::string name, std::vector<std::string> names, std::vector<Interval> dom,
           const std::vector<std::string>& d) {
  const int n = static_cast<int>(names.size());
  std::vector<IndexSet> blocks;
  for (int i = 0; i < n; ++i) blocks.push_back({i});
  Chart c = Chart(std::move(names), std::move(dom)).with_blocks(blocks);
  std::vector<std::vector<Expr>> e(n, std::vector<Expr>(n, Expr::constant(0.0)));
  for (int i = 0; i < n; ++i) e[i][i] = parse_expr(d[i], c);
  return {std::move(name), MetricField(c, e)};
}

}  // namespace

Named euclidean() { return diag("euclidean", {"x0", "x1"}, {{-1, 1}, {-1, 1}}, {"1", "1"}); }
Named polar() { return diag("polar", {"t", "th"}, {{0.5, 2.5}, {0, 3}}, {"1", "t^2"}); }
Named torus() { return diag("torus", {"u", "v"}, {{0.1, 2.5}, {0, 3}}, {"1", "(2 + cos(u))^2"}); }
Named conformal_flat() {
  return diag("conformal-flat", {"x0", "x1"}, {{-1, 1}, {-1, 1}}, {"exp(2*(x0 + x1))", "exp(2*(x0 + x1))"});
}
Named twisted_control() {
  return diag("twisted-control", {"x0", "x1"}, {{0, 1}, {0, 1}}, {"1", "(1 + x0^2*x1)^2"});
}
Named warped3() {
  return diag("warped-3", {"x0", "x1", "x2"}, {{-1, 1}, {-1, 1}, {-1, 1}}, {"1", "1", "exp(2*x0)"});
}
Named quasi_warped3() {
  return diag("quasi-warped-3", {"x0", "x1", "x2"}, {{0, 1}, {0, 1}, {0, 1}},
              {"1", "(1 + x0^2*x1)^2", "exp(2*x0*x2)"});
}

SymTensorField torus_shape_operator() {
  const Chart c = torus().g.chart();
  return SymTensorField::diagonal(c, {Expr::constant(1.0), parse_expr("cos(u)/(2 + cos(u))", c)});
}

SymTensorField cone_tensor() {
  const Chart c = polar().g.chart();
  return SymTensorField::diagonal(c, {Expr::constant(0.0), parse_expr("1/t", c)});
}

}  // namespace netgeom::fixtures
