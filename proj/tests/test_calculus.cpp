#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netgeom/random_expr.hpp"
#include "netgeom/sampling.hpp"
#include "support.hpp"

using namespace netgeom;
using namespace testing;

namespace {

// Christoffel symbols from finite differences of the metric entries, by the
// textbook formula. Independent of the library's symbolic path.
std::vector<double> fd_christoffel(const MetricField& g, const Point& p) {
  const int n = g.dim();
  const Point lo = g.chart().lower(), hi = g.chart().upper();
  std::vector<Matrix> dg(n, Matrix::Zero(n, n));
  Matrix gv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gv(i, j) = g.entry(i, j).eval(p);
      const FiniteDifference f = fd_oracle(g.entry(i, j), p, 1e-4, lo, hi);
      for (int k = 0; k < n; ++k) dg[k](i, j) = f.grad[k];
    }
  const Matrix ginv = gv.inverse();
  std::vector<double> out(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          out[(k * n + i) * n + j] += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return out;
}

VectorField random_field(ExprGenerator& gen, int n) {
  std::vector<Expr> c;
  std::vector<int> vars(n);
  for (int i = 0; i < n; ++i) vars[i] = i;
  for (int i = 0; i < n; ++i) c.push_back(gen.smooth(vars, 2));
  return VectorField(c, n);
}

std::vector<MetricField> test_metrics() {
  return {euclidean(), polar(), torus(), conformal_flat(),
          metric(plane_chart(), {{"2 + sin(x0*x1)", "0.3*x0"}, {"0.3*x0", "1 + x1^2"}})};
}

}  // namespace

TEST_CASE("chart: validation") {
  CHECK_THROWS_AS(chart({"a", "b"}, {{0, 1}, {2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(chart({"a", "a"}, {{0, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(chart({"a"}, {{0, 1}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(chart({}, {}), std::invalid_argument);
  const Chart c = chart({"a", "b", "c"}, {{0, 1}, {0, 1}, {0, 1}});
  CHECK_THROWS_AS(c.with_blocks({{0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(c.with_blocks({{0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(c.with_blocks({{}, {0, 1, 2}}), std::invalid_argument);
  CHECK_NOTHROW(c.with_blocks({{}, {0, 1, 2}}, true));
  const Chart b = c.with_blocks({{2}, {0, 1}});
  CHECK(b.block_of(0) == 1);
  CHECK(b.block_of(2) == 0);
  CHECK(b.contains(pt({0.5, 0.5, 0.5})));
  CHECK_FALSE(b.contains(pt({1.5, 0.5, 0.5})));
}

TEST_CASE("metric: construction checks") {
  const Chart c = plane_chart();
  CHECK_THROWS_AS(metric(c, {{"1", "x0"}, {"x1", "1"}}), std::invalid_argument);
  CHECK_THROWS_AS(metric(c, {{"1", "0"}, {"0", "1"}, {"0", "0"}}), std::invalid_argument);
  CHECK_THROWS_AS(MetricField(c, {{Expr::constant(1), Expr::constant(0)}, {Expr::constant(0), Expr::variable(2)}}),
                  std::invalid_argument);
}

TEST_CASE("metric_at: values, inverse and SPD failures") {
  const MetricAt e = metric_at(euclidean(), pt({0.3, -0.2}));
  CHECK(e.g.isIdentity());
  CHECK(e.inverse.isIdentity());
  const MetricAt p = metric_at(polar(), pt({2.0, 0.0}));
  CHECK(p.g(1, 1) == 4.0);
  CHECK(p.inverse(1, 1) == doctest::Approx(0.25));
  CHECK((p.g * p.inverse - Matrix::Identity(2, 2)).norm() <= 1e-12 * p.condition);
  const MetricField degenerate = diag_metric(chart({"t", "th"}, {{-1, 1}, {0, 1}}), {"1", "t^2"});
  CHECK_THROWS_AS(metric_at(degenerate, pt({0.0, 0.5})), NotSpdError);
  try {
    metric_at(degenerate, pt({0.0, 0.5}));
  } catch (const NotSpdError& err) {
    CHECK(err.min_eigenvalue() == 0.0);
  }
  const MetricAt ill = metric_at(diag_metric(plane_chart(), {"1", "1e-9"}), pt({0, 0}));
  CHECK(ill.ill_conditioned);
}

TEST_CASE("christoffel: flat, polar, symmetry") {
  const Christoffel e = christoffel(euclidean(), pt({0.1, 0.2}));
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(e(k, i, j) == 0.0);
  const Point p = pt({1.7, 0.4});
  const Christoffel c = christoffel(polar(), p);
  const auto fd = fd_christoffel(polar(), p);
  CHECK(c(0, 1, 1) == doctest::Approx(fd[(0 * 2 + 1) * 2 + 1]).epsilon(1e-7));
  CHECK(c(1, 0, 1) == doctest::Approx(fd[(1 * 2 + 0) * 2 + 1]).epsilon(1e-7));
  CHECK(c(0, 1, 1) == doctest::Approx(-1.7));
  CHECK(c(1, 0, 1) == doctest::Approx(1 / 1.7));
  CHECK(c(0, 0, 0) == 0.0);
  CHECK(c(1, 1, 1) == 0.0);
  for (const auto& g : test_metrics()) {
    const Christoffel s = christoffel(g, g.chart().center());
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(s(k, i, j) == s(k, j, i));
  }
}

TEST_CASE("christoffel: agrees with finite differences at second order") {
  for (const auto& g : test_metrics()) {
    for (const Point& p : sample_points(g.chart(), SamplePlan{3, 0.2, 4, 3})) {
      const Christoffel c = christoffel(g, p);
      const auto fd = fd_christoffel(g, p);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) CHECK(std::abs(c(k, i, j) - fd[(k * 2 + i) * 2 + j]) < 1e-6);
    }
  }
}

TEST_CASE("cov_deriv, grad, Hessian, bracket, inner: hand values") {
  const Chart pc = polar_chart();
  const VectorField dt = VectorField::coordinate(0, 2), dth = VectorField::coordinate(1, 2);
  const Point p = pt({2.0, 1.0});
  const Vector v = cov_deriv(polar(), dth, dth, p);
  CHECK(v[0] == doctest::Approx(-2.0));
  CHECK(v[1] == 0.0);
  CHECK(cov_deriv(euclidean(), field(plane_chart(), {"1", "2"}), field(plane_chart(), {"3", "-1"}), pt({0.2, 0.1}))
            .norm() == 0.0);

  const Vector g1 = grad_field(euclidean(), parse_expr("x0^2", plane_chart()), pt({3.0, 0.0}));
  CHECK(g1[0] == doctest::Approx(6.0));
  CHECK(g1[1] == 0.0);
  const Vector g2 = grad_field(polar(), parse_expr("th", pc), p);
  CHECK(g2[0] == 0.0);
  CHECK(g2[1] == doctest::Approx(0.25));

  CHECK(hessian_lc(euclidean(), parse_expr("x0*x1", plane_chart()), VectorField::coordinate(0, 2),
                   VectorField::coordinate(1, 2), pt({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(hessian_lc(polar(), parse_expr("t", pc), dth, dth, p) == doctest::Approx(2.0));

  CHECK(lie_bracket(dt, dth, p).norm() == 0.0);
  const Vector br = lie_bracket(field(plane_chart(), {"x1", "0"}), field(plane_chart(), {"0", "1"}), pt({0.3, 0.4}));
  CHECK(br[0] == -1.0);
  CHECK(br[1] == 0.0);

  Vector e0(2), e1(2);
  e0 << 1, 0;
  e1 << 0, 1;
  CHECK(inner(euclidean(), e0, e1, pt({0, 0})) == 0.0);
  CHECK(inner(polar(), e1, e1, p) == 4.0);
}

TEST_CASE("property: Levi-Civita axioms on random fields") {
  ExprGenerator gen(21);
  for (const auto& g : test_metrics()) {
    for (int trial = 0; trial < 3; ++trial) {
      const VectorField X = random_field(gen, 2), Y = random_field(gen, 2), Z = random_field(gen, 2);
      Expr yz;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) yz = yz + g.entry(a, b) * Y.component(a) * Z.component(b);
      for (const Point& p : sample_points(g.chart(), SamplePlan{3, 0.1, 4, 5})) {
        const MetricAt m = metric_at(g, p);
        const double lhs = X.at(p).dot(eval_jet2(yz, p).grad);
        const double rhs = cov_deriv(g, X, Y, p).dot(m.g * Z.at(p)) + Y.at(p).dot(m.g * cov_deriv(g, X, Z, p));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
        const Vector t = cov_deriv(g, X, Y, p) - cov_deriv(g, Y, X, p) - lie_bracket(X, Y, p);
        CHECK(t.norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("property: gradient, Hessian symmetry, antisymmetry, Cauchy-Schwarz") {
  ExprGenerator gen(22);
  for (const auto& g : test_metrics()) {
    for (int trial = 0; trial < 5; ++trial) {
      const Expr f = gen.smooth({0, 1}, 3);
      const VectorField X = random_field(gen, 2), Y = random_field(gen, 2);
      const Point p = g.chart().center();
      const Vector v = X.at(p), w = Y.at(p);
      const double vf = v.dot(eval_jet2(f, p).grad);
      CHECK(std::abs(inner(g, grad_field(g, f, p), v, p) - vf) <= 1e-11 * std::max(1.0, std::abs(vf)));
      const double hxy = hessian_lc(g, f, X, Y, p), hyx = hessian_lc(g, f, Y, X, p);
      CHECK(std::abs(hxy - hyx) <= 1e-10 * std::max(1.0, std::abs(hxy)));
      CHECK((lie_bracket(X, Y, p) + lie_bracket(Y, X, p)).norm() == 0.0);
      CHECK(std::abs(inner(g, v, w, p)) <= std::sqrt(inner(g, v, v, p) * inner(g, w, w, p)) * (1 + 1e-14));
    }
  }
}

TEST_CASE("sampling: grid plus seeded random points") {
  const Chart c = chart({"a", "b"}, {{0, 1}, {10, 20}});
  const auto pts = sample_points(c, SamplePlan{});
  REQUIRE(pts.size() == 41);
  CHECK(pts[0][0] == doctest::Approx(0.1));
  CHECK(pts[0][1] == doctest::Approx(11.0));
  CHECK(pts[1][1] == doctest::Approx(13.0));
  for (const auto& p : pts) CHECK(c.contains(p));
  const auto again = sample_points(c, SamplePlan{});
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i] == again[i]);
  CHECK(sample_points(c, SamplePlan{5, 0.1, 16, 7})[30] != pts[30]);
  CHECK_THROWS_AS(sample_points(c, SamplePlan{0, 0.1, 0, 1}), std::invalid_argument);
  CHECK(verdict_of(1e-9, 1e-8) == Verdict::Holds);
  CHECK(verdict_of(5e-8, 1e-8) == Verdict::Inconclusive);
  CHECK(verdict_of(2e-7, 1e-8) == Verdict::Fails);
  CHECK(verdict_of(std::nan(""), 1e-8) == Verdict::Fails);
  CHECK(combine(Verdict::NotApplicable, Verdict::Holds) == Verdict::Holds);
  CHECK(combine(Verdict::Inconclusive, Verdict::Fails) == Verdict::Fails);
}
