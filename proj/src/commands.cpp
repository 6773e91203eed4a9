#include "netgeom/commands.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "netgeom/battery.hpp"
#include "netgeom/random_expr.hpp"

namespace netgeom {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"classify", "verify-product", "factorize", "codazzi", "selftest"};
  return names;
}

bool needs_manifest(const std::string& command) { return command != "selftest"; }

std::vector<std::string> required_flags(const ProductSpec& spec) {
  if (spec.kind != ProductKind::Conformal) return expected_flags(spec.kind, spec.factor_count());
  // only the conformally invariant flags survive
  std::vector<std::string> out;
  for (const auto& f : expected_flags(spec.inner->kind, spec.inner->factor_count()))
    if (f == "CQW" || f == "CQW0" || f == "CWP" || f == "CP") out.push_back(f);
  return out;
}

namespace {

struct Context {
  const Manifest* m = nullptr;
  double tol = kDefaultTolerance;
  SamplePlan plan;
  std::uint64_t seed = kDefaultSeed;
};

ordered_json vec(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json vec(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json blocks_json(const std::vector<IndexSet>& blocks) {
  ordered_json a = ordered_json::array();
  for (const auto& b : blocks) a.push_back(b);
  return a;
}

ReportLine measured(std::string subject, double residual, double tol, bool counted = true) {
  return {std::move(subject), verdict_of(residual, tol), residual, tol, "", counted};
}

std::vector<IndexSet> default_blocks(const Chart& chart) {
  if (chart.is_product()) return chart.blocks();
  std::vector<IndexSet> out;
  for (int i = 0; i < chart.dim(); ++i) out.push_back({i});
  return out;
}

ordered_json net_json(const std::string& name, const OrthogonalNet& net, const NetReport& rep) {
  ordered_json o;
  o["name"] = name;
  o["blocks"] = blocks_json(net.blocks());
  o["coordinate_frame"] = net.is_coordinate();
  ordered_json flags;
  for (const auto& f : net_flag_names())
    flags[f] = {{"verdict", to_string(rep.flag(f).verdict)}, {"max_residual", rep.flag(f).max_residual}};
  o["flags"] = flags;
  o["h0_sum_residual"] = rep.h0_sum_residual;
  o["hs0_residual"] = opt(rep.hs0_residual);
  o["ill_conditioned"] = rep.ill_conditioned;
  o["inconsistencies"] = rep.inconsistencies;
  ordered_json pts = ordered_json::array();
  for (const auto& pt : rep.points) {
    ordered_json p;
    p["p"] = vec(pt.p);
    ordered_json bl = ordered_json::array();
    for (const auto& d : pt.blocks)
      bl.push_back({{"H", vec(d.H)},
                    {"eta", vec(d.eta)},
                    {"umbilicity", d.umbilicity},
                    {"umbilicity_perp", d.umbilicity_perp},
                    {"sphericity", d.sphericity},
                    {"sphericity_perp", d.sphericity_perp},
                    {"geodesy", d.geodesy},
                    {"geodesy_perp", d.geodesy_perp},
                    {"integrability", d.integrability},
                    {"integrability_perp", d.integrability_perp}});
    p["blocks"] = bl;
    p["hs"] = vec(pt.hs);
    p["h0_sum"] = pt.h0_sum;
    pts.push_back(p);
  }
  o["points"] = pts;
  return o;
}

void net_lines(Report& r, const std::string& name, const NetReport& rep, const std::map<std::string, bool>& expect,
               double tol) {
  for (const auto& f : net_flag_names()) {
    const FlagResult& fr = rep.flag(f);
    ReportLine l{name + "." + f, fr.verdict, fr.max_residual, tol, "", fr.verdict == Verdict::Inconclusive};
    if (auto it = expect.find(f); it != expect.end()) {
      l.counted = true;
      l.note = it->second ? "expected to hold" : "expected to fail";
      if (fr.verdict != Verdict::Inconclusive)
        l.verdict = (fr.verdict == Verdict::Holds) == it->second ? Verdict::Holds : Verdict::Fails;
    }
    r.lines.push_back(l);
  }
  if (rep.holds("CQW")) r.lines.push_back(measured(name + ".h0-sum", rep.h0_sum_residual, tol));
  if (rep.hs0_residual) r.lines.push_back(measured(name + ".hs0", *rep.hs0_residual, tol));
  for (const auto& msg : rep.inconsistencies)
    r.lines.push_back({name + ".consistency", Verdict::Fails, std::nullopt, std::nullopt, msg, true});
}

void classify(Report& r, const Context& c) {
  const Manifest& m = *c.m;
  std::vector<NetEntry> nets = m.nets;
  if (nets.empty()) nets.push_back({"coordinate", OrthogonalNet::coordinate(m.chart, default_blocks(m.chart)), {}});
  ordered_json arr = ordered_json::array();
  for (const auto& e : nets) {
    const NetReport rep = classify_net(m.metric, e.net, c.plan, c.tol);
    arr.push_back(net_json(e.name, e.net, rep));
    net_lines(r, e.name, rep, e.expect, c.tol);
  }
  r.result["nets"] = arr;
}

void verify_product(Report& r, const Context& c) {
  const Manifest& m = *c.m;
  if (!m.product) throw std::invalid_argument("verify-product needs a \"product\" section in the manifest");
  const ProductSpec& spec = *m.product;
  const Chart& chart = spec.product_chart();
  const int n = chart.dim();

  ExprGenerator gen(c.seed);
  std::vector<VectorField> fields;
  for (int i = 0; i < 6; ++i) {
    std::vector<Expr> comps;
    for (int k = 0; k < n; ++k) {
      std::vector<int> vars(n);
      for (int v = 0; v < n; ++v) vars[v] = v;
      comps.push_back(gen.smooth(vars, 2));
    }
    fields.emplace_back(comps, n);
  }
  double identity = 0.0;
  for (const Point& p : sample_points(chart, c.plan))
    for (int i = 0; i < 6; i += 2) identity = std::max(identity, verify_connection_identity(spec, fields[i], fields[i + 1], p));
  r.lines.push_back(measured("connection-identity", identity, c.tol));

  const OrthogonalNet net = OrthogonalNet::coordinate(chart, chart.blocks());
  const NetReport rep = classify_net(m.metric, net, c.plan, c.tol);
  const auto required = required_flags(spec);
  std::map<std::string, bool> expect;
  for (const auto& f : required) expect[f] = true;
  net_lines(r, "product-net", rep, expect, c.tol);

  r.result["kind"] = to_string(spec.kind);
  if (spec.kind == ProductKind::Conformal) r.result["inner_kind"] = to_string(spec.inner->kind);
  r.result["factors"] = spec.factor_count();
  r.result["required_flags"] = required;
  r.result["connection_identity_residual"] = identity;
  r.result["net"] = net_json("product-net", net, rep);
}

void factorize(Report& r, const Context& c) {
  const Manifest& m = *c.m;
  if (!m.chart.is_product()) throw std::invalid_argument("factorize needs chart blocks");
  FactorizeOptions opt;
  opt.grid = m.factorize.grid;
  opt.base = m.factorize.base;
  opt.tolerance = c.tol;
  opt.precondition_samples = c.plan;
  Factorization f;
  try {
    f = factorize_cwp(m.metric, opt);
  } catch (const FactorizationError& e) {
    r.lines.push_back({"factorization", Verdict::Fails, std::nullopt, std::nullopt, e.what(), true});
    return;
  }
  const double rtol = m.factorize.tolerance;
  r.lines.push_back(measured("reconstruction", f.reconstruction_error, rtol));
  r.lines.push_back(measured("path-order", f.path_order_residual, opt.path_tolerance));
  if (f.conformal_product) r.lines.push_back(measured("cp-fit", f.cp_fit_residual, rtol));

  ordered_json axes = ordered_json::array();
  for (const auto& a : f.axes) axes.push_back(vec(a));
  ordered_json& o = r.result;
  o["axes"] = axes;
  o["names"] = m.chart.names();
  o["blocks"] = blocks_json(m.chart.blocks());
  o["base"] = vec(f.base);
  o["phi"] = vec(f.phi);
  ordered_json rho = ordered_json::array(), psi = ordered_json::array(), pf = ordered_json::array();
  for (const auto& v : f.rho_tilde) rho.push_back(vec(v));
  for (const auto& v : f.psi) psi.push_back(vec(v));
  for (const auto& v : f.phi_factor) pf.push_back(vec(v));
  o["rho_tilde"] = rho;
  o["rho_tilde_base"] = vec(f.rho_tilde_base);
  o["psi"] = psi;
  o["phi_factor"] = pf;
  o["reconstruction_error"] = f.reconstruction_error;
  o["path_order_residual"] = f.path_order_residual;
  o["conformal_product"] = f.conformal_product;
  if (f.conformal_product) {
    o["cp_constants"] = vec(f.cp_constants);
    o["cp_fit_residual"] = f.cp_fit_residual;
    o["cp_phi"] = vec(f.cp_phi);
  }
  if (f.phi_closed) {
    o["phi_closed"] = f.phi_closed->str(m.chart.names());
    ordered_json rc = ordered_json::array();
    for (const auto& e : f.rho_tilde_closed) rc.push_back(e.str(m.chart.names()));
    o["rho_tilde_closed"] = rc;
  }
}

ordered_json criteria_json(const CriteriaRecord& k) {
  return {{"p", vec(k.p)},
          {"lambda", k.lambda},
          {"mu", k.mu},
          {"mcn", k.mcn},
          {"cpnet", opt(k.cpnet)},
          {"mulambda1", k.mulambda1},
          {"mulambda2", k.mulambda2},
          {"s1", k.s1},
          {"s2", k.s2},
          {"pns", k.pns},
          {"grad_lambda_on_lambda", k.grad_lambda_on_lambda},
          {"grad_mu_on_mu", k.grad_mu_on_mu},
          {"h_residual", opt(k.h_residual)},
          {"tilmu", opt(k.tilmu)}};
}

void codazzi(Report& r, const Context& c) {
  const Manifest& m = *c.m;
  if (m.tensors.empty()) throw std::invalid_argument("codazzi needs at least one entry in \"tensors\"");
  ordered_json arr = ordered_json::array();
  for (const auto& t : m.tensors) {
    ordered_json o;
    o["name"] = t.name;
    o["h"] = t.h_name ? ordered_json(*t.h_name) : ordered_json(nullptr);
    CodazziReport rep;
    try {
      rep = classify_codazzi(m.metric, t.phi, t.h, c.plan, c.tol);
    } catch (const CodazziError& e) {
      r.lines.push_back({t.name + ".codazzi", Verdict::Fails, std::nullopt, c.tol, e.what(), true});
      o["error"] = e.what();
      arr.push_back(o);
      continue;
    }
    const std::string n = t.name + ".";
    r.lines.push_back(measured(n + "codazzi", rep.codazzi_residual, c.tol));
    r.lines.push_back(measured(n + "mean-curvature-normal", rep.mcn, c.tol));
    r.lines.push_back(measured(n + "normals", rep.pns, c.tol));
    r.lines.push_back(measured(n + "two-path-s1", rep.s1, c.tol));
    r.lines.push_back(measured(n + "two-path-s2", rep.s2, c.tol));
    ReportLine iso{n + "isothermic", rep.isothermic, rep.cpnet, c.tol, "", rep.isothermic == Verdict::Inconclusive};
    if (rep.cpnet_skipped) iso.note = std::to_string(rep.cpnet_skipped) + " samples skipped where lambda + mu vanishes";
    r.lines.push_back(iso);
    r.lines.push_back({n + "eigenvalue-criteria", rep.mulambda_both, std::max(rep.mulambda1, rep.mulambda2), c.tol, "",
                       rep.mulambda_both == Verdict::Inconclusive});
    r.lines.push_back({n + "cp-net", rep.cp_net, std::nullopt, c.tol, "", rep.cp_net == Verdict::Inconclusive});
    if (rep.warped_case != WarpedCase::NotRequested) {
      ReportLine cl{n + "case", Verdict::Holds, std::nullopt, std::nullopt, to_string(rep.warped_case), false};
      if (!rep.case_note.empty()) cl.note += ": " + rep.case_note;
      if (t.expect_case) {
        cl.counted = true;
        cl.verdict = *t.expect_case == to_string(rep.warped_case) ? Verdict::Holds : Verdict::Fails;
        cl.note += " (expected " + *t.expect_case + ")";
      }
      r.lines.push_back(cl);
    }
    if (rep.tilmu_residual) r.lines.push_back(measured(n + "warping-relation", *rep.tilmu_residual, c.tol));
    for (const auto& msg : rep.inconsistencies)
      r.lines.push_back({n + "consistency", Verdict::Fails, std::nullopt, std::nullopt, msg, true});

    o["codazzi_residual"] = rep.codazzi_residual;
    o["self_adjoint_defect"] = rep.self_adjoint_defect;
    o["rank_lambda"] = rep.rank_lambda;
    o["rank_mu"] = rep.rank_mu;
    o["mcn"] = rep.mcn;
    o["pns"] = rep.pns;
    o["s1"] = rep.s1;
    o["s2"] = rep.s2;
    o["mulambda1"] = rep.mulambda1;
    o["mulambda2"] = rep.mulambda2;
    o["cpnet"] = opt(rep.cpnet);
    o["cpnet_skipped"] = rep.cpnet_skipped;
    o["isothermic"] = to_string(rep.isothermic);
    o["eigenvalue_criteria"] = to_string(rep.mulambda_both);
    o["cp_net"] = to_string(rep.cp_net);
    o["case"] = rep.warped_case == WarpedCase::NotRequested ? ordered_json(nullptr)
                                                                  : ordered_json(to_string(rep.warped_case));
    o["case_note"] = rep.case_note;
    o["h_residual"] = opt(rep.h_residual);
    o["warping_relation_residual"] = opt(rep.tilmu_residual);
    o["constant_lambda"] = opt(rep.constant_lambda);
    o["constant_mu"] = opt(rep.constant_mu);
    o["inconsistencies"] = rep.inconsistencies;
    ordered_json net;
    net["flags"] = ordered_json::object();
    for (const auto& f : net_flag_names())
      net["flags"][f] = {{"verdict", to_string(rep.net.flag(f).verdict)},
                         {"max_residual", rep.net.flag(f).max_residual}};
    o["eigenbundle_net"] = net;
    ordered_json pts = ordered_json::array();
    for (const auto& k : rep.points) pts.push_back(criteria_json(k));
    o["points"] = pts;
    arr.push_back(o);
  }
  r.result["tensors"] = arr;
}

void selftest(Report& r, const Context& c) {
  ordered_json arr = ordered_json::array();
  for (const Check& ch : run_battery(c.seed)) {
    ordered_json o;
    o["id"] = ch.id;
    o["title"] = ch.title;
    o["verdict"] = to_string(ch.verdict());
    ordered_json ms = ordered_json::array();
    for (const auto& mm : ch.measures) {
      ms.push_back({{"name", mm.name},
                    {"value", mm.value},
                    {"threshold", mm.threshold},
                    {"bound", mm.at_most ? "at-most" : "above"}});
      r.lines.push_back({ch.id + ": " + mm.name, mm.passes() ? Verdict::Holds : Verdict::Fails, mm.value,
                         mm.threshold, mm.at_most ? "" : "must exceed the threshold", true});
    }
    o["measures"] = ms;
    arr.push_back(o);
  }
  r.result["checks"] = arr;
}

}  // namespace

Report run(const std::string& command, const Manifest* manifest, const RunOptions& options) {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    throw std::invalid_argument("unknown command '" + command + "'");
  if (needs_manifest(command) && !manifest) throw std::invalid_argument(command + " needs --manifest");

  Context c;
  c.m = manifest;
  if (manifest) {
    c.plan = manifest->sampling;
    if (manifest->tolerance) c.tol = *manifest->tolerance;
  }
  if (options.tolerance) c.tol = *options.tolerance;
  if (options.samples) c.plan.random = *options.samples;
  if (options.seed) c.plan.seed = *options.seed;
  c.seed = options.seed.value_or(kDefaultSeed);
  if (!(c.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  Report r;
  r.command = command;
  r.settings["tolerance"] = c.tol;
  if (command == "selftest") {
    r.settings["seed"] = c.seed;
  } else {
    r.settings["sampling"] = {
        {"grid", c.plan.grid}, {"margin", c.plan.margin}, {"random", c.plan.random}, {"seed", c.plan.seed}};
  }

  const auto t0 = std::chrono::steady_clock::now();
  if (command == "classify") classify(r, c);
  else if (command == "verify-product") verify_product(r, c);
  else if (command == "factorize") factorize(r, c);
  else if (command == "codazzi") codazzi(r, c);
  else selftest(r, c);
  if (options.timing) r.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace netgeom
