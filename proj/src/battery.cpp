#include "netgeom/battery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "netgeom/codazzi.hpp"
#include "netgeom/fixtures.hpp"
#include "netgeom/nets.hpp"

namespace netgeom {

Verdict Check::verdict() const {
  for (const auto& m : measures)
    if (!m.passes()) return Verdict::Fails;
  return Verdict::Holds;
}

namespace {

std::vector<int> iota(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

Point random_point(ExprGenerator& gen, int n, double lo, double hi) {
  Point p(n);
  for (int i = 0; i < n; ++i) p[i] = gen.uniform(lo, hi);
  return p;
}

VectorField random_field(ExprGenerator& gen, int n, int depth) {
  std::vector<Expr> c;
  for (int i = 0; i < n; ++i) c.push_back(gen.smooth(iota(n), depth));
  return VectorField(c, n);
}

OrthogonalNet block_net(const MetricField& g) { return OrthogonalNet::coordinate(g.chart(), g.chart().blocks()); }

}  // namespace

ProductSpec random_spec(ExprGenerator& gen, ProductKind kind) {
  const int parts = gen.integer(2, 3);
  std::vector<int> dims(parts, 1);
  int total = parts;
  for (int i = 0; i < parts && total < 4; ++i)
    if (gen.integer(0, 2) == 0) {
      ++dims[i];
      ++total;
    }
  std::vector<std::string> names;
  std::vector<Interval> dom;
  std::vector<IndexSet> blocks;
  for (int i = 0, a = 0; i < parts; ++i) {
    blocks.emplace_back();
    for (int d = 0; d < dims[i]; ++d, ++a) {
      names.push_back("x" + std::to_string(a));
      dom.push_back({-1.0, 1.0});
      blocks.back().push_back(a);
    }
  }
  ProductSpec spec;
  spec.kind = kind;
  spec.chart = Chart(names, dom).with_blocks(blocks);
  for (int i = 0; i < parts; ++i) {
    const auto& b = blocks[i];
    std::vector<std::vector<Expr>> m(b.size(), std::vector<Expr>(b.size(), Expr::constant(0.0)));
    for (std::size_t r = 0; r < b.size(); ++r) m[r][r] = gen.positive(b, 1, 0.3);
    if (b.size() == 2) m[0][1] = m[1][0] = 0.2 * sin(gen.smooth(b, 1));
    spec.factor_metrics.push_back(m);
  }
  for (int i = 0; i < parts; ++i) {
    std::vector<int> vars;
    switch (kind) {
      case ProductKind::Product: break;
      case ProductKind::Warped: vars = blocks[0]; break;
      case ProductKind::QuasiWarped:
        vars = blocks[0];
        vars.insert(vars.end(), blocks[i].begin(), blocks[i].end());
        break;
      default: vars = iota(total); break;
    }
    const bool unit = kind == ProductKind::Product || (i == 0 && kind != ProductKind::Twisted);
    spec.twists.push_back(unit ? Expr::constant(1.0) : gen.positive(vars, 2));
  }
  check_kind(spec);
  return spec;
}

std::vector<std::string> expected_flags(ProductKind kind, int block_count) {
  const bool two = block_count == 2;
  switch (kind) {
    case ProductKind::Product: return net_flag_names();
    case ProductKind::Warped:
      if (two) return net_flag_names();
      return {"TP", "WP", "QW", "CQW", "CWP"};
    case ProductKind::QuasiWarped:
      if (two) return {"TP", "QW", "CQW", "CQW0"};
      return {"TP", "QW", "CQW"};
    case ProductKind::Twisted:
      if (two) return {"TP", "CQW", "CQW0"};
      return {"TP"};
    default: return {};
  }
}

Check check_derivatives(std::uint64_t seed) {
  ExprGenerator gen(seed);
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  int covered = 0;
  for (int s = 0; s < 200; ++s) {
    const int n = gen.integer(1, 3);
    const Expr e = gen.smooth(iota(n), gen.integer(2, 4));
    const Point p = random_point(gen, n, -1.0, 1.0);
    const Point lo = Point::Constant(n, -2.0), hi = Point::Constant(n, 2.0);
    const Jet2 j = eval_jet2(e, p);
    const FiniteDifference f1 = fd_oracle(e, p, 1e-3, lo, hi);
    const FiniteDifference f2 = fd_oracle(e, p, 5e-4, lo, hi);
    const double scale = std::max(1.0, std::abs(j.value));
    bool any = false;
    auto consider = [&](double e1, double e2, double floor) {
      if (e1 < floor * scale) return;
      any = true;
      const double r = e1 / e2;
      min_ratio = std::min(min_ratio, r);
      max_ratio = std::max(max_ratio, r);
    };
    for (int i = 0; i < n; ++i) {
      consider(std::abs(f1.grad[i] - j.grad[i]), std::abs(f2.grad[i] - j.grad[i]), 1e-9);
      for (int k = i; k < n; ++k)
        consider(std::abs(f1.hess(i, k) - j.hess(i, k)), std::abs(f2.hess(i, k) - j.hess(i, k)), 1e-6);
    }
    covered += any;
  }
  return {"derivatives",
          "symbolic vs finite-difference derivatives converge at second order",
          {{"min error ratio h/(h/2)", min_ratio, 3.5, false},
           {"max error ratio h/(h/2)", max_ratio, 4.5, true},
           {"pairs with a non-degenerate entry", static_cast<double>(covered), 100.0, false}}};
}

Check check_levi_civita(std::uint64_t seed) {
  ExprGenerator gen(seed ^ 0x1cu);
  double compat = 0.0, torsion = 0.0;
  for (const auto& fx : {fixtures::euclidean(), fixtures::polar(), fixtures::torus(), fixtures::conformal_flat()}) {
    const MetricField& g = fx.g;
    const int n = g.dim();
    for (int trial = 0; trial < 2; ++trial) {
      const VectorField X = random_field(gen, n, 2), Y = random_field(gen, n, 2), Z = random_field(gen, n, 2);
      Expr yz = Expr::constant(0.0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) yz = yz + g.entry(a, b) * Y.component(a) * Z.component(b);
      for (const Point& p : sample_points(g.chart(), SamplePlan{})) {
        const MetricAt m = metric_at(g, p);
        const Vector x = X.at(p), y = Y.at(p), z = Z.at(p);
        const double lhs = x.dot(eval_jet2(yz, p).grad);
        const double rhs = cov_deriv(g, X, Y, p).dot(m.g * z) + y.dot(m.g * cov_deriv(g, X, Z, p));
        compat = std::max(compat, std::abs(lhs - rhs));
        const Vector t = cov_deriv(g, X, Y, p) - cov_deriv(g, Y, X, p) - lie_bracket(X, Y, p);
        torsion = std::max(torsion, std::sqrt(t.dot(m.g * t)));
      }
    }
  }
  return {"levi-civita",
          "metric compatibility and torsion-freeness on the fixture metrics",
          {{"metric compatibility", compat, 1e-10, true}, {"torsion", torsion, 1e-10, true}}};
}

Check check_connection_identity(std::uint64_t seed) {
  ExprGenerator gen(seed ^ 0x2du);
  double worst = 0.0;
  for (int s = 0; s < 25; ++s) {
    const ProductSpec spec = random_spec(gen, ProductKind::Twisted);
    const int n = spec.chart.dim();
    for (int pair = 0; pair < 20; ++pair) {
      const VectorField X = random_field(gen, n, 2), Y = random_field(gen, n, 2);
      const Point p = random_point(gen, n, -0.9, 0.9);
      worst = std::max(worst, verify_connection_identity(spec, X, Y, p));
    }
  }
  return {"connection-identity",
          "Levi-Civita connection of twisted products from the untwisted one",
          {{"max residual", worst, 1e-9, true}}};
}

Check check_round_trip(std::uint64_t seed) {
  ExprGenerator gen(seed ^ 0x3eu);
  const ProductKind kinds[] = {ProductKind::Product, ProductKind::Warped, ProductKind::QuasiWarped,
                               ProductKind::Twisted};
  int mismatches = 0;
  for (int s = 0; s < 25; ++s) {
    const ProductSpec spec = random_spec(gen, kinds[s % 4]);
    const MetricField g = build_metric(spec);
    const NetReport rep = classify_net(g, block_net(g), SamplePlan{}, 1e-8);
    const auto want = expected_flags(spec.kind, spec.factor_count());
    for (const auto& f : net_flag_names()) {
      const bool expect = std::find(want.begin(), want.end(), f) != want.end();
      if (rep.flag(f).verdict != (expect ? Verdict::Holds : Verdict::Fails)) ++mismatches;
    }
  }
  const auto control = fixtures::twisted_control();
  const NetReport neg = classify_net(control.g, block_net(control.g), SamplePlan{}, 1e-8);
  return {"round-trip",
          "built product metrics classify as their kind",
          {{"flag mismatches over 25 specs", static_cast<double>(mismatches), 0.0, true},
           {"twisted control CWP residual", neg.flag("CWP").max_residual, 1e-3, false},
           {"twisted control CWP fails", neg.flag("CWP").verdict == Verdict::Fails ? 1.0 : 0.0, 0.5, false},
           {"twisted control TP holds", neg.holds("TP") ? 1.0 : 0.0, 0.5, false}}};
}

Check check_conformal_invariance(std::uint64_t seed) {
  ExprGenerator gen(seed ^ 0x4fu);
  int mismatches = 0;
  for (const auto& fx : {fixtures::euclidean(), fixtures::polar(), fixtures::torus(), fixtures::conformal_flat(),
                         fixtures::twisted_control(), fixtures::warped3()}) {
    const OrthogonalNet net = block_net(fx.g);
    const NetReport base = classify_net(fx.g, net, SamplePlan{}, 1e-8);
    for (int s = 0; s < 10; ++s) {
      const Expr phi = gen.positive(iota(fx.g.dim()), 2, 0.3);
      const NetReport scaled = classify_net(conformal_scale(fx.g, phi), net, SamplePlan{}, 1e-8);
      for (const char* f : {"CWP", "CP"})
        if (scaled.flag(f).verdict != base.flag(f).verdict) ++mismatches;
    }
  }
  return {"conformal-invariance",
          "CWP and CP flags survive conformal changes of the metric",
          {{"flag mismatches", static_cast<double>(mismatches), 0.0, true}}};
}

Check check_spherical_factor() {
  ProductSpec spec;
  spec.kind = ProductKind::Product;
  spec.chart = Chart({"x0", "x1"}, {{0.1, 1.0}, {0.1, 1.0}}).with_blocks({{0}, {1}});
  spec.factor_metrics = {{{Expr::constant(1.0)}}, {{Expr::constant(1.0)}}};
  spec.twists = {Expr::constant(1.0), Expr::constant(1.0)};
  const Expr x0 = Expr::variable(0), x1 = Expr::variable(1);
  SphericalCheck sum, prod;
  for (const Point& p : sample_points(spec.chart, SamplePlan{})) {
    const SphericalCheck a = spherical_factor_check(spec, 1.0 / (x0 + x1), 1, p);
    const SphericalCheck b = spherical_factor_check(spec, 1.0 / (x0 * x1), 1, p);
    sum.residual_ii = std::max(sum.residual_ii, a.residual_ii);
    sum.residual_iii = std::max(sum.residual_iii, a.residual_iii);
    sum.residual_v = std::max(sum.residual_v, a.residual_v);
    prod.residual_ii = std::max(prod.residual_ii, b.residual_ii);
    prod.residual_iii = std::max(prod.residual_iii, b.residual_iii);
    prod.residual_v = std::max(prod.residual_v, b.residual_v);
  }
  return {"spherical-factor",
          "conformal factor structure conditions agree",
          {{"sum factor residual (ii)", sum.residual_ii, 1e-9, true},
           {"sum factor residual (iii)", sum.residual_iii, 1e-9, true},
           {"sum factor residual (v)", sum.residual_v, 1e-9, true},
           {"product factor residual (ii)", prod.residual_ii, 1e-3, false},
           {"product factor residual (iii)", prod.residual_iii, 1e-3, false},
           {"product factor residual (v)", prod.residual_v, 1e-3, false}}};
}

Check check_factorization() {
  const auto polar = fixtures::polar();
  const MetricField g = conformal_scale(polar.g, exp(Expr::variable(0) + Expr::variable(1)));
  const Factorization f = factorize_cwp(g);
  return {"factorization",
          "conformal warped factorization rebuilds the metric",
          {{"reconstruction error", f.reconstruction_error, 1e-6, true},
           {"path-order residual", f.path_order_residual, 1e-7, true}}};
}

Check check_codazzi_torus() {
  const auto torus = fixtures::torus();
  const SymTensorField phi = fixtures::torus_shape_operator();
  const CodazziReport rep = classify_codazzi(torus.g, phi, Expr::constant(1.0), SamplePlan{}, 1e-8);
  Point p(2);
  p << std::numbers::pi / 3.0, 0.0;
  const EigenPair ep = eigen_two(torus.g, phi, p);
  double closed = 0.0;
  for (const auto& r : rep.points) {
    const double sigma = std::sqrt(torus.g.entry(1, 1).eval(r.p));
    closed = std::max(closed, std::abs(r.mu - (1.0 - 2.0 / sigma)));
  }
  return {"codazzi-torus",
          "torus shape operator: Codazzi, eigenvalues, criteria, warped case",
          {{"codazzi residual", rep.codazzi_residual, 1e-10, true},
           {"|lambda - 1| at (pi/3, 0)", std::abs(ep.lambda - 1.0), 1e-10, true},
           {"|mu - 0.2| at (pi/3, 0)", std::abs(ep.mu - 0.2), 1e-10, true},
           {"cpnet residual", rep.cpnet.value_or(std::numeric_limits<double>::infinity()), 1e-9, true},
           {"mulambda1 residual", rep.mulambda1, 1e-9, true},
           {"case (ii) detected", rep.warped_case == WarpedCase::CaseII ? 1.0 : 0.0, 0.5, false},
           {"warping relation residual", rep.tilmu_residual.value_or(std::numeric_limits<double>::infinity()), 1e-9,
            true},
           {"closed form mu = 1 - 2/sigma", closed, 1e-9, true}}};
}

Check check_two_path() {
  const auto torus = fixtures::torus();
  const auto polar = fixtures::polar();
  const Chart c = Chart({"x0", "x1"}, {{0.15, 1.0}, {0.15, 1.0}}).with_blocks({{0}, {1}});
  const CodazziCandidate thm = build_canonical_pair(c, Expr::variable(0), Expr::variable(1), {{Expr::constant(1.0)}},
                                                 {{Expr::constant(1.0)}});
  const CodazziReport a = classify_codazzi(torus.g, fixtures::torus_shape_operator(), std::nullopt, SamplePlan{}, 1e-8);
  const CodazziReport b = classify_codazzi(polar.g, fixtures::cone_tensor(), std::nullopt, SamplePlan{}, 1e-8);
  const CodazziReport t = classify_codazzi(thm.g, thm.phi, std::nullopt, SamplePlan{}, 1e-8);
  return {"two-path",
          "derivatives of mean curvature normals match the eigenvalue formulas",
          {{"torus s1", a.s1, 1e-9, true},
           {"torus s2", a.s2, 1e-9, true},
           {"cone s1", b.s1, 1e-9, true},
           {"cone s2", b.s2, 1e-9, true},
           {"canonical pair s1", t.s1, 1e-9, true},
           {"canonical pair s2", t.s2, 1e-9, true},
           {"canonical pair codazzi residual", thm.codazzi_residual, 1e-8, true}}};
}

Check check_h0_sum() {
  const auto fx = fixtures::quasi_warped3();
  const NetReport rep = classify_net(fx.g, block_net(fx.g), SamplePlan{}, 1e-8);
  return {"h0-sum",
          "mean curvature normal of E0 is the sum of the complement normals",
          {{"CQW holds", rep.holds("CQW") ? 1.0 : 0.0, 0.5, false},
           {"h0 sum residual", rep.h0_sum_residual, 1e-9, true}}};
}

std::vector<Check> run_battery(std::uint64_t seed) {
  return {check_derivatives(seed),   check_levi_civita(seed),        check_connection_identity(seed),
          check_round_trip(seed),    check_conformal_invariance(seed), check_spherical_factor(),
          check_factorization(),     check_codazzi_torus(),          check_two_path(),
          check_h0_sum()};
}

}  // namespace netgeom
