#include "netgeom/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace netgeom {

namespace {

using json = nlohmann::json;
using Kind = ManifestError::Kind;

std::string join(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string join(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

[[noreturn]] void fail(Kind kind, const std::string& ptr, const std::string& msg) { throw ManifestError(kind, ptr, msg); }

const char* type_name(const json& j) { return j.type_name(); }

void require_object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(Kind::Schema, ptr, std::string("expected an object, got ") + type_name(j));
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(Kind::Schema, join(ptr, k), "unknown key");
}

const json& member(const json& j, const std::string& ptr, const char* key) {
  if (!j.contains(key)) fail(Kind::Schema, join(ptr, key), "required key missing");
  return j.at(key);
}

const json& array(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(Kind::Schema, ptr, std::string("expected an array, got ") + type_name(j));
  return j;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(Kind::Schema, ptr, std::string("expected a number, got ") + type_name(j));
  return j.get<double>();
}

long long integer(const json& j, const std::string& ptr, long long lo) {
  if (!j.is_number_integer()) fail(Kind::Schema, ptr, std::string("expected an integer, got ") + type_name(j));
  long long v = j.get<long long>();
  if (v < lo) fail(Kind::Schema, ptr, "must be at least " + std::to_string(lo));
  return v;
}

std::string string(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(Kind::Schema, ptr, std::string("expected a string, got ") + type_name(j));
  return j.get<std::string>();
}

Expr expression(const json& j, const std::string& ptr, const std::vector<std::string>& names,
                const FunctionTable& fns) {
  if (j.is_number()) return Expr::constant(j.get<double>());
  const std::string text = string(j, ptr);
  try {
    return parse_expr(text, names, fns);
  } catch (const ParseError& e) {
    const Kind k = e.kind() == ParseError::Kind::UnknownIdentifier ? Kind::UnknownName : Kind::Expression;
    fail(k, ptr, std::string(e.what()) + " in \"" + text + "\"");
  }
}

std::vector<std::vector<Expr>> matrix(const json& j, const std::string& ptr, int rows, int cols,
                                      const std::vector<std::string>& names, const FunctionTable& fns) {
  array(j, ptr);
  if (static_cast<int>(j.size()) != rows)
    fail(Kind::Dimension, ptr, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  std::vector<std::vector<Expr>> out;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = join(ptr, r);
    array(j[r], rp);
    if (static_cast<int>(j[r].size()) != cols)
      fail(Kind::Dimension, rp, "expected " + std::to_string(cols) + " columns, got " + std::to_string(j[r].size()));
    out.emplace_back();
    for (std::size_t c = 0; c < j[r].size(); ++c) out.back().push_back(expression(j[r][c], join(rp, c), names, fns));
  }
  return out;
}

std::vector<IndexSet> blocks_of(const json& j, const std::string& ptr, int dim) {
  array(j, ptr);
  std::vector<IndexSet> out;
  for (std::size_t b = 0; b < j.size(); ++b) {
    array(j[b], join(ptr, b));
    out.emplace_back();
    for (std::size_t i = 0; i < j[b].size(); ++i)
      out.back().push_back(static_cast<int>(integer(j[b][i], join(join(ptr, b), i), 0)));
  }
  try {
    validate_partition(out, dim, false);
  } catch (const std::invalid_argument& e) {
    fail(Kind::Dimension, ptr, e.what());
  }
  return out;
}

Chart parse_chart(const json& j) {
  const std::string ptr = "/chart";
  require_object(j, ptr, {"dim", "names", "domain", "blocks"});
  const json& names = array(member(j, ptr, "names"), join(ptr, "names"));
  const json& domain = array(member(j, ptr, "domain"), join(ptr, "domain"));
  std::vector<std::string> nm;
  for (std::size_t i = 0; i < names.size(); ++i) nm.push_back(string(names[i], join(join(ptr, "names"), i)));
  if (j.contains("dim") && integer(j["dim"], join(ptr, "dim"), 1) != static_cast<long long>(nm.size()))
    fail(Kind::Dimension, join(ptr, "dim"), "dim disagrees with the number of names");
  if (domain.size() != nm.size())
    fail(Kind::Dimension, join(ptr, "domain"),
         "expected " + std::to_string(nm.size()) + " intervals, got " + std::to_string(domain.size()));
  std::vector<Interval> dom;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const std::string ip = join(join(ptr, "domain"), i);
    array(domain[i], ip);
    if (domain[i].size() != 2) fail(Kind::Schema, ip, "interval must be [lo, hi]");
    dom.push_back({number(domain[i][0], join(ip, 0)), number(domain[i][1], join(ip, 1))});
  }
  Chart chart;
  try {
    chart = Chart(nm, dom);
  } catch (const std::invalid_argument& e) {
    fail(Kind::Schema, ptr, e.what());
  }
  if (j.contains("blocks")) chart = chart.with_blocks(blocks_of(j["blocks"], join(ptr, "blocks"), chart.dim()));
  return chart;
}

FunctionTable parse_functions(const json& j) {
  const std::string ptr = "/functions";
  FunctionTable fns;
  array(j, ptr);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string fp = join(ptr, i);
    require_object(j[i], fp, {"name", "var", "body"});
    const std::string name = string(member(j[i], fp, "name"), join(fp, "name"));
    const std::string var = string(member(j[i], fp, "var"), join(fp, "var"));
    if (fns.contains(name)) fail(Kind::Schema, join(fp, "name"), "function " + name + " defined twice");
    fns.define(name, expression(member(j[i], fp, "body"), join(fp, "body"), {var}, fns));
  }
  return fns;
}

ProductSpec parse_product(const json& j, const Chart& chart, const FunctionTable& fns) {
  const std::string ptr = "/product";
  require_object(j, ptr, {"kind", "factors", "twists", "phi"});
  if (!chart.is_product()) fail(Kind::Schema, "/chart/blocks", "a product manifest needs chart blocks");
  ProductKind kind;
  try {
    kind = parse_product_kind(string(member(j, ptr, "kind"), join(ptr, "kind")));
  } catch (const std::invalid_argument& e) {
    fail(Kind::Schema, join(ptr, "kind"), e.what());
  }
  if (kind == ProductKind::Conformal)
    fail(Kind::Schema, join(ptr, "kind"), "give the underlying kind and a \"phi\" entry instead of \"conformal\"");
  const auto& blocks = chart.blocks();
  const json& factors = array(member(j, ptr, "factors"), join(ptr, "factors"));
  const json& twists = array(member(j, ptr, "twists"), join(ptr, "twists"));
  if (factors.size() != blocks.size())
    fail(Kind::Dimension, join(ptr, "factors"),
         "expected " + std::to_string(blocks.size()) + " factors, got " + std::to_string(factors.size()));
  if (twists.size() != blocks.size())
    fail(Kind::Dimension, join(ptr, "twists"),
         "expected " + std::to_string(blocks.size()) + " twists, got " + std::to_string(twists.size()));
  ProductSpec spec;
  spec.kind = kind;
  spec.chart = chart;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string fp = join(join(ptr, "factors"), i);
    require_object(factors[i], fp, {"metric"});
    const int r = static_cast<int>(blocks[i].size());
    spec.factor_metrics.push_back(matrix(member(factors[i], fp, "metric"), join(fp, "metric"), r, r, chart.names(), fns));
    spec.twists.push_back(expression(twists[i], join(join(ptr, "twists"), i), chart.names(), fns));
  }
  try {
    check_kind(spec);
  } catch (const KindError& e) {
    fail(Kind::Schema, ptr, e.what());
  }
  if (j.contains("phi")) spec = make_conformal(spec, expression(j["phi"], join(ptr, "phi"), chart.names(), fns));
  return spec;
}

std::map<std::string, bool> net_expectations(const json& j, const std::string& ptr) {
  std::map<std::string, bool> out;
  if (!j.is_object()) fail(Kind::Schema, ptr, "expected an object of flag: bool");
  const auto& names = net_flag_names();
  for (const auto& [k, v] : j.items()) {
    if (std::find(names.begin(), names.end(), k) == names.end()) fail(Kind::UnknownName, join(ptr, k), "unknown flag");
    if (!v.is_boolean()) fail(Kind::Schema, join(ptr, k), "expected true or false");
    out[k] = v.get<bool>();
  }
  return out;
}

SamplePlan parse_sampling(const json& j) {
  const std::string ptr = "/sampling";
  require_object(j, ptr, {"grid", "margin", "random", "seed"});
  SamplePlan plan;
  if (j.contains("grid")) plan.grid = static_cast<int>(integer(j["grid"], join(ptr, "grid"), 0));
  if (j.contains("margin")) {
    plan.margin = number(j["margin"], join(ptr, "margin"));
    if (plan.margin < 0.0 || plan.margin >= 0.5) fail(Kind::Schema, join(ptr, "margin"), "must lie in [0, 0.5)");
  }
  if (j.contains("random")) plan.random = static_cast<int>(integer(j["random"], join(ptr, "random"), 0));
  if (j.contains("seed")) plan.seed = static_cast<std::uint64_t>(integer(j["seed"], join(ptr, "seed"), 0));
  if (plan.grid == 0 && plan.random == 0) fail(Kind::Schema, ptr, "sampling yields no points");
  return plan;
}

Manifest build(const json& doc) {
  require_object(doc, "", {"chart", "metric", "product", "nets", "tensors", "functions", "sampling", "tolerance",
                           "factorize", "description"});
  const Chart chart0 = parse_chart(member(doc, "", "chart"));
  const FunctionTable fns = doc.contains("functions") ? parse_functions(doc["functions"]) : FunctionTable{};
  const int n = chart0.dim();

  if (doc.contains("metric") == doc.contains("product"))
    fail(Kind::Schema, "", "exactly one of \"metric\" and \"product\" is required");
  std::optional<ProductSpec> product;
  std::optional<MetricField> metric;
  if (doc.contains("product")) {
    product = parse_product(doc["product"], chart0, fns);
    metric = build_metric(*product);
  } else {
    const json& m = doc["metric"];
    require_object(m, "/metric", {"components"});
    auto entries = matrix(member(m, "/metric", "components"), "/metric/components", n, n, chart0.names(), fns);
    try {
      metric = MetricField(chart0, entries);
    } catch (const std::invalid_argument& e) {
      fail(Kind::Schema, "/metric/components", e.what());
    }
  }
  const Chart& chart = metric->chart();

  std::vector<NetEntry> nets;
  if (doc.contains("nets")) {
    const json& arr = array(doc["nets"], "/nets");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string np = join("/nets", i);
      const json& e = arr[i];
      require_object(e, np, {"name", "blocks", "frame", "expect"});
      const std::string name = e.contains("name") ? string(e["name"], join(np, "name")) : "net" + std::to_string(i);
      auto blocks = blocks_of(member(e, np, "blocks"), join(np, "blocks"), n);
      std::optional<OrthogonalNet> net;
      if (e.contains("frame")) {
        auto rows = matrix(e["frame"], join(np, "frame"), n, n, chart.names(), fns);
        std::vector<VectorField> frame;
        for (auto& r : rows) frame.emplace_back(r, n);
        net.emplace(chart, std::move(frame), blocks);
      } else {
        net = OrthogonalNet::coordinate(chart, blocks);
      }
      nets.push_back({name, *net, e.contains("expect") ? net_expectations(e["expect"], join(np, "expect"))
                                                       : std::map<std::string, bool>{}});
    }
  }

  std::vector<TensorEntry> tensors;
  if (doc.contains("tensors")) {
    const json& arr = array(doc["tensors"], "/tensors");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string tp = join("/tensors", i);
      const json& e = arr[i];
      require_object(e, tp, {"name", "components", "h", "expect"});
      TensorEntry t{e.contains("name") ? string(e["name"], join(tp, "name")) : "tensor" + std::to_string(i),
                    SymTensorField(chart, matrix(member(e, tp, "components"), join(tp, "components"), n, n,
                                                 chart.names(), fns)),
                    std::nullopt, std::nullopt, std::nullopt};
      if (e.contains("h")) {
        const std::string h = string(e["h"], join(tp, "h"));
        if (!fns.contains(h)) fail(Kind::UnknownName, join(tp, "h"), "unknown function '" + h + "'");
        t.h_name = h;
        t.h = fns.body(h);
      }
      if (e.contains("expect")) {
        const std::string ep = join(tp, "expect");
        require_object(e["expect"], ep, {"case"});
        if (e["expect"].contains("case")) {
          const std::string c = string(e["expect"]["case"], join(ep, "case"));
          if (c != "case-i" && c != "case-ii" && c != "outside-hypotheses")
            fail(Kind::Schema, join(ep, "case"), "expected case-i, case-ii or outside-hypotheses");
          t.expect_case = c;
        }
      }
      tensors.push_back(std::move(t));
    }
  }

  SamplePlan plan = doc.contains("sampling") ? parse_sampling(doc["sampling"]) : SamplePlan{};
  std::optional<double> tol;
  if (doc.contains("tolerance")) {
    tol = number(doc["tolerance"], "/tolerance");
    if (!(*tol > 0.0)) fail(Kind::Schema, "/tolerance", "must be positive");
  }
  FactorizeSettings fac;
  if (doc.contains("factorize")) {
    const json& f = doc["factorize"];
    require_object(f, "/factorize", {"base", "grid", "tolerance"});
    if (f.contains("base")) {
      const json& b = array(f["base"], "/factorize/base");
      if (static_cast<int>(b.size()) != n)
        fail(Kind::Dimension, "/factorize/base", "expected " + std::to_string(n) + " coordinates");
      Point p(n);
      for (int i = 0; i < n; ++i) p[i] = number(b[i], join("/factorize/base", i));
      if (!chart.contains(p)) fail(Kind::Schema, "/factorize/base", "base point lies outside the chart domain");
      fac.base = p;
    }
    if (f.contains("grid")) fac.grid = static_cast<int>(integer(f["grid"], "/factorize/grid", 2));
    if (f.contains("tolerance")) fac.tolerance = number(f["tolerance"], "/factorize/tolerance");
  }
  return Manifest{chart, *metric, product, fns, std::move(nets), std::move(tensors), plan, tol, fac};
}

}  // namespace

Manifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(Kind::Json, "", std::string("invalid JSON: ") + e.what());
  }
  return build(doc);
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError(Kind::Io, "", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

}  // namespace netgeom
