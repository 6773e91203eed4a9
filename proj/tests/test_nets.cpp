#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netgeom/battery.hpp"
#include "netgeom/fixtures.hpp"
#include "netgeom/nets.hpp"
#include "netgeom/product.hpp"
#include "support.hpp"

using namespace netgeom;
using namespace testing;

namespace {

OrthogonalNet pair_net(const MetricField& g) { return OrthogonalNet::coordinate(g.chart(), {{0}, {1}}); }

std::map<std::string, Verdict> verdicts(const NetReport& r) {
  std::map<std::string, Verdict> out;
  for (const auto& f : net_flag_names()) out[f] = r.flag(f).verdict;
  return out;
}

}  // namespace

TEST_CASE("project: inside, orthogonal, resolution of identity") {
  const MetricField g = polar();
  const auto net = pair_net(g);
  const Point p = pt({1.3, 0.7});
  const Vector d0 = Vector::Unit(2, 0);
  CHECK((project(g, net, {0}, d0, p) - d0).norm() == 0.0);
  CHECK(project(g, net, {1}, d0, p).norm() == 0.0);

  // non-coordinate net on a non-diagonal metric
  const Chart c = plane_chart();
  const MetricField h = metric(c, {{"2 + x1^2", "0.5*x0"}, {"0.5*x0", "1 + x0^2"}});
  // frame: f0 = d0, f1 = g-orthogonal complement of d0
  const OrthogonalNet on(c, {field(c, {"1", "0"}), field(c, {"-0.5*x0", "2 + x1^2"})}, {{0}, {1}});
  const Point q = pt({0.4, -0.3});
  on.validate(h, q, 1e-12);
  ExprGenerator gen(31);
  for (int s = 0; s < 20; ++s) {
    Vector v(2);
    v << gen.uniform(-2, 2), gen.uniform(-2, 2);
    const Vector a = project(h, on, {0}, v, q), b = project(h, on, {1}, v, q);
    CHECK((a + b - v).norm() <= 1e-12 * v.norm());
    CHECK((project(h, on, {0}, a, q) - a).norm() <= 1e-12 * v.norm());
    CHECK(std::abs(inner(h, a, b, q)) <= 1e-12 * v.squaredNorm());
  }
}

TEST_CASE("net validation") {
  const Chart c = plane_chart();
  const MetricField g = metric(c, {{"1", "0.2"}, {"0.2", "1"}});
  CHECK_THROWS_AS(pair_net(g).validate(g, pt({0, 0}), 1e-8), std::invalid_argument);
  const OrthogonalNet skew(c, {field(c, {"1", "0"}), field(c, {"1", "1"})}, {{0}, {1}});
  CHECK_THROWS_AS(skew.validate(euclidean(), pt({0, 0}), 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(OrthogonalNet(c, {field(c, {"1", "0"}), field(c, {"2", "0"})}, {{0, 1}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(OrthogonalNet(c, {field(c, {"1", "0"})}, {{0}, {1}}), std::invalid_argument);
  const OrthogonalNet degenerate(c, {field(c, {"1", "0"}), field(c, {"0", "x0"})}, {{0}, {1}});
  CHECK_THROWS_AS(degenerate.validate(euclidean(), pt({0.0, 0.3}), 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(classify_net(g, pair_net(g), SamplePlan{}, 1e-8), std::invalid_argument);
}

TEST_CASE("distribution geometry: polar by hand") {
  // g = dt^2 + t^2 dth^2: nabla_{dth} dth = -t dt, so H_1 = -dt / t and E_0 is geodesic
  const MetricField g = polar();
  const auto net = pair_net(g);
  const auto d1 = distribution_geometry(g, net, 1, pt({2.0, 1.0}));
  CHECK(d1.H[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(std::abs(d1.H[1]) < 1e-14);
  CHECK(d1.umbilicity == 0.0);
  CHECK(d1.sphericity < 1e-13);
  CHECK(d1.eta.norm() < 1e-14);
  const auto d0 = distribution_geometry(g, net, 0, pt({2.0, 1.0}));
  CHECK(d0.geodesy < 1e-14);
  CHECK(d0.integrability == 0.0);
  CHECK(d0.integrability_perp == 0.0);
}

TEST_CASE("distribution geometry: flat product and coordinate brackets") {
  const MetricField g = euclidean();
  const auto d = distribution_geometry(g, pair_net(g), 0, pt({0.2, -0.4}));
  for (double r : {d.umbilicity, d.umbilicity_perp, d.sphericity, d.sphericity_perp, d.geodesy, d.geodesy_perp,
                   d.integrability, d.integrability_perp})
    CHECK(r == 0.0);
  const auto fx = fixtures::quasi_warped3();
  const auto net3 = OrthogonalNet::coordinate(fx.g.chart(), {{0}, {1, 2}});
  for (int i = 0; i < 2; ++i) {
    const auto e = distribution_geometry(fx.g, net3, i, pt({0.3, 0.6, 0.2}));
    CHECK(e.integrability == 0.0);
    CHECK(e.integrability_perp == 0.0);
  }
}

TEST_CASE("distribution geometry: non-integrable frame block") {
  // E_0 = span(d0 + x0 d2, d1) in flat R^3 is not involutive: [d0 + x0 d2, d1] = 0 but
  // with f1 = d1 + x0 d2 the bracket [f0, f1] = d2 leaves the span
  const Chart c = chart({"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  const MetricField g = diag_metric(c, {"1", "1", "1"});
  const OrthogonalNet net(c, {field(c, {"1", "0", "0"}), field(c, {"0", "1", "x"}), field(c, {"0", "-x", "1"})},
                          {{0, 1}, {2}});
  const auto d = distribution_geometry(g, net, 0, pt({0.0, 0.0, 0.0}));
  CHECK(d.integrability == doctest::Approx(1.0));
}

TEST_CASE("symmetry residual: conformal flat, polar, twisted control") {
  const Chart c = plane_chart();
  const MetricField cf = conformal_flat();
  CHECK(cwp_residual(cf, pair_net(cf), 1, pt({0.3, -0.2}), 1e-8).value() <= 1e-10);
  CHECK(cwp_residual(polar(), pair_net(polar()), 1, pt({2.0, 1.0}), 1e-8).value() <= 1e-12);

  // rho^2 (dx0^2 + dx1^2) is conformally flat, so its coordinate net is CP and the residual vanishes
  const MetricField rho2 = diag_metric(c, {"(1 + x0^2*x1)^2", "(1 + x0^2*x1)^2"});
  CHECK(cwp_residual(rho2, pair_net(rho2), 1, pt({0.5, 0.5}), 1e-8).value() <= 1e-10);

  // dx^2 + rho^2 dy^2: eta = 0 and the residual reduces to |d_x d_y log rho| / rho = 2x / rho^3
  const auto tw = fixtures::twisted_control();
  for (const Point& p : {pt({0.5, 0.5}), pt({0.9, 0.2}), pt({0.25, 0.75})}) {
    const double rho = 1 + p[0] * p[0] * p[1];
    const double want = 2 * p[0] / (rho * rho * rho);
    CHECK(cwp_residual(tw.g, pair_net(tw.g), 1, p, 1e-8).value() == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK(cwp_residual(tw.g, pair_net(tw.g), 1, pt({0.5, 0.5}), 1e-8).value() > 1e-3);
}

TEST_CASE("symmetry residual is not applicable when a side is not umbilical") {
  const Chart c = chart({"x0", "x1", "x2"}, {{-1, 1}, {-1, 1}, {-1, 1}});
  const MetricField g = diag_metric(c, {"1", "exp(2*x0)", "exp(4*x0)"});
  const auto net = OrthogonalNet::coordinate(c, {{0}, {1, 2}});
  CHECK_FALSE(cwp_residual(g, net, 1, pt({0.1, 0.2, 0.3}), 1e-8).has_value());
  const NetReport rep = classify_net(g, net, SamplePlan{}, 1e-8);
  CHECK(rep.flag("CWP").verdict == Verdict::Fails);
  CHECK(rep.flag("TP").verdict == Verdict::Fails);
}

TEST_CASE("classify: fixture flags") {
  const NetReport p = classify_net(polar(), pair_net(polar()), SamplePlan{}, 1e-8);
  for (const auto& f : net_flag_names()) CHECK_MESSAGE(p.holds(f), f);
  CHECK(p.hs0_residual.has_value());
  CHECK(p.inconsistencies.empty());

  const auto w = fixtures::warped3();
  const NetReport wr = classify_net(w.g, OrthogonalNet::coordinate(w.g.chart(), {{0}, {1}, {2}}), SamplePlan{}, 1e-8);
  CHECK(wr.holds("WP"));
  CHECK(wr.holds("CWP"));
  CHECK(wr.flag("CQW0").verdict == Verdict::Fails);

  const auto tw = fixtures::twisted_control();
  const NetReport tr = classify_net(tw.g, pair_net(tw.g), SamplePlan{}, 1e-8);
  CHECK(tr.holds("TP"));
  CHECK(tr.flag("WP").verdict == Verdict::Fails);
  CHECK(tr.flag("CWP").verdict == Verdict::Fails);
  CHECK(tr.flag("CWP").max_residual > 1e-3);
  CHECK_FALSE(tr.hs0_residual.has_value());

  const auto q = fixtures::quasi_warped3();
  const NetReport qr = classify_net(q.g, OrthogonalNet::coordinate(q.g.chart(), {{0}, {1}, {2}}), SamplePlan{}, 1e-8);
  CHECK(qr.holds("CQW"));
  CHECK(qr.h0_sum_residual <= 1e-12);
}

TEST_CASE("classify: inconclusive band") {
  // twist of size 2e-8 puts the symmetry residual between tol and 10 tol
  const MetricField g = diag_metric(chart({"x0", "x1"}, {{0, 1}, {0, 1}}), {"1", "(1 + 2e-8*x0^2*x1)^2"});
  const NetReport r = classify_net(g, pair_net(g), SamplePlan{}, 1e-8);
  CHECK(r.flag("CWP").verdict == Verdict::Inconclusive);
  CHECK(r.holds("TP"));
}

TEST_CASE("reduce_net: implication violations are reported") {
  PointGeometry pt0;
  pt0.p = pt({0, 0});
  DistributionGeometry d0, d1;
  d1.block = 1;
  d1.sphericity = 0.0;
  d0.integrability_perp = 1.0;  // TP fails through block 0 only
  pt0.blocks = {d0, d1};
  pt0.hs = {0.0, 0.0};
  const NetReport r = reduce_net({pt0}, 1e-8);
  CHECK(r.holds("WP"));
  CHECK(r.flag("TP").verdict == Verdict::Fails);
  REQUIRE_FALSE(r.inconsistencies.empty());
  CHECK(r.inconsistencies[0].find("WP holds but TP fails") != std::string::npos);
  CHECK_THROWS_AS(reduce_net({}, 1e-8), std::invalid_argument);
}

TEST_CASE("property: frame recombination inside a block keeps every flag") {
  ExprGenerator gen(41);
  int tested = 0;
  for (int s = 0; s < 16 && tested < 6; ++s) {
    const ProductKind kinds[] = {ProductKind::Warped, ProductKind::QuasiWarped, ProductKind::Twisted,
                                 ProductKind::Product};
    const ProductSpec spec = random_spec(gen, kinds[s % 4]);
    const MetricField g = build_metric(spec);
    const auto& blocks = g.chart().blocks();
    int wide = -1;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (blocks[b].size() == 2) wide = static_cast<int>(b);
    if (wide < 0) continue;
    const int n = g.dim(), a = blocks[wide][0], c = blocks[wide][1];
    std::vector<VectorField> frame;
    for (int i = 0; i < n; ++i) frame.push_back(VectorField::coordinate(i, n));
    // f_a -> (2 + sin x_a) d_a + x_c d_c, f_c -> d_a - d_c: invertible on [-1, 1]^n
    std::vector<Expr> fa(n, Expr::constant(0)), fc(n, Expr::constant(0));
    fa[a] = 2.0 + sin(Expr::variable(a));
    fa[c] = Expr::variable(c);
    fc[a] = Expr::constant(1);
    fc[c] = Expr::constant(-1);
    frame[a] = VectorField(fa, n);
    frame[c] = VectorField(fc, n);
    const OrthogonalNet mixed(g.chart(), frame, blocks);
    const auto plain = verdicts(classify_net(g, OrthogonalNet::coordinate(g.chart(), blocks), SamplePlan{}, 1e-8));
    const auto other = verdicts(classify_net(g, mixed, SamplePlan{}, 1e-8));
    CHECK(plain == other);
    ++tested;
  }
  CHECK(tested >= 3);
}

TEST_CASE("property: constant scaling keeps every flag") {
  for (const auto& fx : {fixtures::polar(), fixtures::torus(), fixtures::twisted_control(), fixtures::warped3(),
                         fixtures::quasi_warped3()}) {
    const auto net = OrthogonalNet::coordinate(fx.g.chart(), fx.g.chart().blocks());
    const auto base = verdicts(classify_net(fx.g, net, SamplePlan{}, 1e-8));
    for (double c : {0.1, 3.0}) {
      const MetricField scaled = conformal_scale(fx.g, Expr::constant(c));
      CHECK_MESSAGE(verdicts(classify_net(scaled, net, SamplePlan{}, 1e-8)) == base, fx.name);
    }
  }
}

TEST_CASE("property: umbilical complements force the H0 sum rule") {
  ExprGenerator gen(42);
  const double tol = 1e-8;
  int tested = 0;
  for (int s = 0; s < 12; ++s) {
    const ProductSpec spec = random_spec(gen, s % 2 ? ProductKind::QuasiWarped : ProductKind::Warped);
    const MetricField g = conformal_scale(build_metric(spec), gen.positive({0, 1}, 2, 0.3));
    const auto net = OrthogonalNet::coordinate(g.chart(), g.chart().blocks());
    const NetReport r = classify_net(g, net, SamplePlan{3, 0.1, 4, 9}, tol);
    const int k = net.block_count() - 1;
    for (const auto& pt0 : r.points) {
      bool pre = true;
      for (int i = 1; i <= k; ++i) pre = pre && pt0.blocks[i].umbilicity <= tol && pt0.blocks[i].umbilicity_perp <= tol;
      if (!pre) continue;
      ++tested;
      CHECK(pt0.blocks[0].umbilicity <= tol * k);
      CHECK(pt0.h0_sum <= tol * k);
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("property: spherical blocks of CWP nets have spherical complements") {
  ExprGenerator gen(43);
  const double tol = 1e-8;
  int spherical = 0, other = 0;
  for (int s = 0; s < 10; ++s) {
    ProductSpec spec = random_spec(gen, ProductKind::Warped);
    const int n = spec.chart.dim();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    // half of the cases keep the warped metric, where E_i is spherical
    const MetricField g = s % 2 ? build_metric(spec) : conformal_scale(build_metric(spec), gen.positive(all, 1, 0.3));
    const auto net = OrthogonalNet::coordinate(g.chart(), g.chart().blocks());
    const NetReport r = classify_net(g, net, SamplePlan{3, 0.1, 2, 4}, tol);
    if (!r.holds("CWP")) continue;
    for (const auto& pt0 : r.points)
      for (std::size_t i = 1; i < pt0.blocks.size(); ++i) {
        const auto& d = pt0.blocks[i];
        if (d.sphericity <= tol) {
          ++spherical;
          CHECK(d.sphericity_perp <= 100 * tol);
        } else if (d.sphericity > 10 * tol) {
          ++other;
          CHECK(d.sphericity_perp > tol);
        }
      }
  }
  CHECK(spherical > 0);
  CHECK(other > 0);
}
