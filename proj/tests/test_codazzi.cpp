#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "netgeom/codazzi.hpp"
#include "netgeom/fixtures.hpp"
#include "support.hpp"

using namespace netgeom;
using namespace testing;

namespace {

const Expr x0 = Expr::variable(0), x1 = Expr::variable(1);

SymTensorField tensor(const Chart& c, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Expr>> e;
  for (const auto& r : rows) {
    e.emplace_back();
    for (const auto& s : r) e.back().push_back(parse_expr(s, c));
  }
  return SymTensorField(c, e);
}

Chart box(double lo0, double hi0, double lo1, double hi1) {
  return Chart({"x0", "x1"}, {{lo0, hi0}, {lo1, hi1}}).with_blocks({{0}, {1}});
}

const SamplePlan kPlan{4, 0.1, 6, 7};

}  // namespace

TEST_CASE("codazzi residual: parallel, torus, cone") {
  const auto torus = fixtures::torus();
  const SymTensorField c3 = SymTensorField::diagonal(torus.g.chart(), {Expr::constant(3.0), Expr::constant(3.0)});
  const SymTensorField shape = fixtures::torus_shape_operator();
  for (const Point& p : sample_points(torus.g.chart(), kPlan)) {
    CHECK(codazzi_residual(torus.g, c3, p) <= 1e-14);
    CHECK(codazzi_residual(torus.g, shape, p) <= 1e-10);
  }
  const auto polar = fixtures::polar();
  for (const Point& p : sample_points(polar.g.chart(), kPlan))
    CHECK(codazzi_residual(polar.g, fixtures::cone_tensor(), p) <= 1e-14);
}

TEST_CASE("codazzi residual: flat diagonal oracle") {
  // flat metric, Phi = diag(f0, f1): (nabla_0 Phi) d1 - (nabla_1 Phi) d0 = d0 f1 d1 - d1 f0 d0
  const Chart c = plane_chart();
  const SymTensorField phi = SymTensorField::diagonal(c, {x1 * x1, sin(x0)});
  for (const Point& p : {pt({0.3, -0.4}), pt({-0.9, 0.8}), pt({0.0, 0.0})}) {
    const double want = std::hypot(2 * p[1], std::cos(p[0]));
    CHECK(codazzi_residual(euclidean(), phi, p) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("codazzi residual: self-adjointness") {
  const Chart c = plane_chart();
  const SymTensorField skew = tensor(c, {{"1", "x0 + 1"}, {"0", "2"}});
  CHECK(self_adjoint_defect(euclidean(), skew, pt({0.5, 0.0})) > 0.1);
  CHECK_THROWS_AS(codazzi_residual(euclidean(), skew, pt({0.5, 0.0})), CodazziError);
  // g-self-adjoint but not symmetric as a matrix: Phi = g^{-1} S with S symmetric
  const MetricField g = diag_metric(c, {"1", "4"});
  const SymTensorField phi = tensor(c, {{"1", "2"}, {"0.5", "1"}});
  CHECK(self_adjoint_defect(g, phi, pt({0.1, 0.2})) <= 1e-15);
  CHECK_THROWS(SymTensorField(c, {{x0}}));
}

TEST_CASE("eigen_two: torus, coalescence, ranks") {
  const auto torus = fixtures::torus();
  const EigenPair e = eigen_two(torus.g, fixtures::torus_shape_operator(), pt({std::numbers::pi / 3, 0.0}));
  CHECK(e.lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.mu == doctest::Approx(0.2).epsilon(1e-14));
  REQUIRE(e.basis_lambda.size() == 1);
  CHECK(std::abs(e.basis_lambda[0][0]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.gap == doctest::Approx(0.8).epsilon(1e-13));

  const Chart c = plane_chart();
  CHECK_THROWS_AS(eigen_two(euclidean(), SymTensorField::diagonal(c, {Expr::constant(1), Expr::constant(1)}), pt({0, 0})),
                  CoalescenceError);
  CHECK_THROWS_AS(eigen_two(euclidean(), SymTensorField::diagonal(c, {Expr::constant(1), 1.0 + 1e-8 * x0}), pt({0.5, 0})),
                  CoalescenceError);

  const Chart c3 = chart({"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  const MetricField e3 = diag_metric(c3, {"1", "1", "1"});
  const auto two_three = SymTensorField::diagonal(c3, {Expr::constant(2), Expr::constant(3), Expr::constant(3)});
  const EigenPair r = eigen_two(e3, two_three, pt({0, 0, 0}));
  CHECK(r.lambda == doctest::Approx(2.0));
  CHECK(r.mu == doctest::Approx(3.0));
  CHECK(r.basis_lambda.size() == 1);
  CHECK(r.basis_mu.size() == 2);
  const auto three = SymTensorField::diagonal(c3, {Expr::constant(1), Expr::constant(2), Expr::constant(3)});
  CHECK_THROWS_AS(eigen_two(e3, three, pt({0, 0, 0})), CoalescenceError);

  // tracking keeps the label on the nearest cluster
  const EigenPair t = eigen_two(e3, two_three, pt({0, 0, 0}), kDefaultGapMin, 2.9);
  CHECK(t.lambda == doctest::Approx(3.0));
  CHECK(t.basis_lambda.size() == 2);
}

TEST_CASE("criteria: constant eigenvalues") {
  const Chart c = plane_chart();
  const auto phi = SymTensorField::diagonal(c, {Expr::constant(0), Expr::constant(1)});
  for (const Point& p : {pt({0.2, 0.3}), pt({-0.7, 0.1})}) {
    const CriteriaRecord r = criteria_residuals(euclidean(), phi, p);
    CHECK(r.lambda == 0.0);
    CHECK(r.mu == 1.0);
    CHECK(r.cpnet.value() == 0.0);
    CHECK(r.mulambda1 == 0.0);
    CHECK(r.mulambda2 == 0.0);
    CHECK(r.s1 == 0.0);
    CHECK(r.s2 == 0.0);
    CHECK(r.mcn == 0.0);
  }
}

TEST_CASE("criteria: constant eigenvalue sum and the singular case") {
  // alpha = (lambda + mu) / 2 = 1 is constant, so every term of the isothermic condition vanishes
  const Chart c = box(0.2, 1, 0.2, 1);
  const MetricField g = diag_metric(c, {"1", "(1 + x0)^2"});
  const auto phi = SymTensorField::diagonal(c, {1.0 + x0 * x1, 1.0 - x0 * x1});
  CHECK(criteria_residuals(g, phi, pt({0.5, 0.7})).cpnet.value() <= 1e-15);
  const auto opposite = SymTensorField::diagonal(c, {x0, -x0});
  CHECK_FALSE(criteria_residuals(g, opposite, pt({0.5, 0.7})).cpnet.has_value());
}

TEST_CASE("criteria: torus") {
  const auto torus = fixtures::torus();
  for (const Point& p : sample_points(torus.g.chart(), kPlan)) {
    const CriteriaRecord r = criteria_residuals(torus.g, fixtures::torus_shape_operator(), p);
    CHECK(r.cpnet.value() <= 1e-9);
    CHECK(r.mulambda1 <= 1e-9);
    CHECK(r.s1 <= 1e-9);
    CHECK(r.s2 <= 1e-9);
    CHECK(r.pns <= 1e-9);
    CHECK(r.mcn <= 1e-9);
    CHECK(r.grad_mu_on_mu <= 1e-12);
  }
}

TEST_CASE("classify: torus lands in case (ii)") {
  const auto torus = fixtures::torus();
  const CodazziReport r = classify_codazzi(torus.g, fixtures::torus_shape_operator(), Expr::constant(1.0), kPlan, 1e-8);
  CHECK(r.warped_case == WarpedCase::CaseII);
  CHECK(r.rank_lambda == 1);
  CHECK(r.rank_mu == 1);
  CHECK(r.tilmu_residual.value() <= 1e-9);
  CHECK(r.h_residual.value() <= 1e-12);
  CHECK(r.isothermic == Verdict::Holds);
  CHECK(r.net.holds("WP"));
  CHECK(r.inconsistencies.empty());
  // integrating the relation with K = 2 gives mu = 1 - 2 / (2 + cos u)
  for (const auto& pt0 : r.points) CHECK(pt0.mu == doctest::Approx(1 - 2 / (2 + std::cos(pt0.p[0]))).epsilon(1e-13));
}

TEST_CASE("classify: cone and constants") {
  const auto polar = fixtures::polar();
  const CodazziReport cone = classify_codazzi(polar.g, fixtures::cone_tensor(), Expr::constant(0.0), kPlan, 1e-8);
  CHECK(cone.warped_case == WarpedCase::CaseII);
  CHECK(cone.tilmu_residual.value() <= 1e-12);
  for (const auto& pt0 : cone.points) CHECK(pt0.mu == doctest::Approx(1 / pt0.p[0]).epsilon(1e-14));

  const Chart c = plane_chart();
  const auto phi = SymTensorField::diagonal(c, {Expr::constant(2), Expr::constant(3)});
  const CodazziReport k = classify_codazzi(euclidean(), phi, Expr::constant(2.0), kPlan, 1e-8);
  CHECK(k.warped_case == WarpedCase::CaseI);
  CHECK(k.constant_lambda.value() == 2.0);
  CHECK(k.constant_mu.value() == 3.0);
  CHECK(k.net.holds("WP"));
  CHECK(k.net.holds("CP"));

  const CodazziReport wrong_h = classify_codazzi(euclidean(), phi, Expr::constant(5.0), kPlan, 1e-8);
  CHECK(wrong_h.warped_case == WarpedCase::Outside);
  CHECK(classify_codazzi(euclidean(), phi, std::nullopt, kPlan, 1e-8).warped_case == WarpedCase::NotRequested);
}

TEST_CASE("classify: errors") {
  const Chart c = plane_chart();
  CHECK_THROWS_AS(classify_codazzi(euclidean(), SymTensorField::diagonal(c, {x1 * x1, sin(x0)}), std::nullopt, kPlan, 1e-8),
                  CodazziError);
  CHECK_THROWS_AS(classify_codazzi(euclidean(), SymTensorField::diagonal(c, {x0, x1}), std::nullopt, kPlan, 1e-8),
                  CoalescenceError);
}

TEST_CASE("warped pair builder") {
  const Chart c = Chart({"t", "th"}, {{0.5, 2.5}, {0, 3}}).with_blocks({{0}, {1}});
  const Expr t = Expr::variable(0);
  const std::vector<std::vector<Expr>> f1 = {{Expr::constant(1.0)}};
  const CodazziCandidate cone = build_warped_pair(c, Expr::constant(0.0), t, 1.0 / t, f1);
  CHECK(cone.codazzi_residual <= 1e-12);
  CHECK(metric_at(cone.g, pt({2.0, 1.0})).g(1, 1) == doctest::Approx(4.0));
  CHECK(cone.phi.at(pt({2.0, 1.0}))(1, 1) == doctest::Approx(0.5));
  CHECK(build_warped_pair(c, Expr::constant(0.0), t, 2.0 / t, f1).codazzi_residual <= 1e-10);
  CHECK_THROWS(build_warped_pair(c, Expr::constant(0.0), t, t * t, f1));
  CHECK_THROWS(build_warped_pair(c, Expr::constant(0.0), t, 1.0 / (t + Expr::variable(1)), f1));
}

TEST_CASE("canonical pair builder") {
  const Chart c = box(0.15, 1.0, 0.15, 1.0);
  const std::vector<std::vector<Expr>> e1 = {{Expr::constant(1.0)}};
  const CodazziCandidate cand = build_canonical_pair(c, x0, x1, e1, e1);
  CHECK(cand.codazzi_residual <= 1e-8);
  const Point p = pt({0.3, 0.8});
  CHECK(metric_at(cand.g, p).g(0, 0) == doctest::Approx(1 / 1.21).epsilon(1e-14));
  CHECK(cand.phi.at(p)(0, 0) == doctest::Approx(0.8));
  CHECK(cand.phi.at(p)(1, 1) == doctest::Approx(-0.3));
  for (const Point& q : sample_points(c, kPlan)) CHECK(codazzi_residual(cand.g, cand.phi, q) <= 1e-8);
  CHECK_THROWS(build_canonical_pair(box(-1, 1, -1, 1), x0, x1, e1, e1));
}

TEST_CASE("property: constant scaling of the tensor") {
  const auto torus = fixtures::torus();
  const SymTensorField shape = fixtures::torus_shape_operator();
  const CodazziReport base = classify_codazzi(torus.g, shape, std::nullopt, kPlan, 1e-8);
  for (double s : {0.25, 7.0}) {
    std::vector<std::vector<Expr>> comps = shape.components();
    for (auto& row : comps)
      for (auto& e : row) e = s * e;
    const CodazziReport r = classify_codazzi(torus.g, SymTensorField(torus.g.chart(), comps), std::nullopt, kPlan, 1e-8);
    CHECK(r.rank_lambda == base.rank_lambda);
    CHECK(r.cp_net == base.cp_net);
    CHECK(r.isothermic == base.isothermic);
    CHECK(r.mulambda_both == base.mulambda_both);
    for (std::size_t j = 0; j < r.points.size(); ++j) {
      CHECK(r.points[j].lambda == doctest::Approx(s * base.points[j].lambda).epsilon(1e-12));
      CHECK(r.points[j].mu == doctest::Approx(s * base.points[j].mu).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: CP eigenbundle nets match the eigenvalue criteria") {
  struct Input {
    MetricField g;
    SymTensorField phi;
  };
  const Chart c = box(0.15, 1.0, 0.15, 1.0);
  const Chart tc = Chart({"t", "th"}, {{0.5, 2.5}, {0, 3}}).with_blocks({{0}, {1}});
  const Expr t = Expr::variable(0);
  const std::vector<std::vector<Expr>> e1 = {{Expr::constant(1.0)}};
  const auto can = build_canonical_pair(c, x0, x1, e1, e1);
  const auto can2 = build_canonical_pair(c, x0 * x0 + 0.5, exp(x1), e1, e1);
  const auto cor = build_warped_pair(tc, Expr::constant(0.5), sqrt(t), 0.5 + 1.0 / sqrt(t), e1);
  std::vector<Input> inputs = {{fixtures::torus().g, fixtures::torus_shape_operator()},
                               {fixtures::polar().g, fixtures::cone_tensor()},
                               {can.g, can.phi},
                               {can2.g, can2.phi},
                               {cor.g, cor.phi}};
  int definite = 0;
  for (const auto& in : inputs) {
    const CodazziReport r = classify_codazzi(in.g, in.phi, std::nullopt, kPlan, 1e-8);
    CHECK(r.inconsistencies.empty());
    CHECK(r.s1 <= 1e-9);
    CHECK(r.s2 <= 1e-9);
    CHECK(r.pns <= 1e-9);
    if (r.cp_net == Verdict::Inconclusive || r.mulambda_both == Verdict::Inconclusive) continue;
    ++definite;
    CHECK((r.cp_net == Verdict::Holds) == (r.mulambda_both == Verdict::Holds));
    // wherever lambda is constant along its bundle, that bundle is spherical
    for (const auto& pt0 : r.points)
      if (pt0.grad_lambda_on_lambda <= 1e-8) CHECK(pt0.sphericity_lambda <= 1e-6);
  }
  CHECK(definite >= 4);
}
