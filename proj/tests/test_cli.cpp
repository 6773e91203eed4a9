#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "netgeom/commands.hpp"
#include "netgeom/manifest.hpp"
#include "netgeom/report.hpp"

using namespace netgeom;

namespace {

std::string fixture(const std::string& name) { return std::string(NETGEOM_FIXTURES) + "/" + name; }

Report run_fixture(const std::string& name, const std::string& command, const RunOptions& opt = {}) {
  const Manifest m = load_manifest(fixture(name));
  return run(command, &m, opt);
}

ManifestError::Kind error_kind(const std::string& text, std::string* pointer = nullptr) {
  try {
    parse_manifest(text);
  } catch (const ManifestError& e) {
    if (pointer) *pointer = e.pointer();
    return e.kind();
  }
  FAIL("manifest accepted: " << text);
  return ManifestError::Kind::Io;
}

const std::string kChart = R"("chart": {"names": ["x", "y"], "domain": [[0, 1], [0, 1]], "blocks": [[0], [1]]})";

}  // namespace

TEST_CASE("manifest: fixtures load") {
  const Manifest p = load_manifest(fixture("polar.json"));
  CHECK(p.chart.names() == std::vector<std::string>{"t", "th"});
  REQUIRE(p.nets.size() == 1);
  CHECK(p.nets[0].name == "radial-angular");
  CHECK(p.nets[0].expect.size() == 4);
  CHECK(p.nets[0].expect.at("CP"));
  CHECK(p.tolerance.value() == 1e-8);
  CHECK((*p.factorize.base - Point(Eigen::Vector2d(1, 1.5))).norm() == 0.0);
  CHECK(metric_at(p.metric, Point(Eigen::Vector2d(2, 0))).g(1, 1) == 4.0);

  const Manifest t = load_manifest(fixture("torus.json"));
  REQUIRE(t.tensors.size() == 1);
  CHECK(t.tensors[0].h_name.value() == "one");
  CHECK(t.tensors[0].expect_case.value() == "case-ii");
  CHECK(t.tensors[0].h->eval(Point(Eigen::Matrix<double, 1, 1>(5.0))) == 1.0);

  const Manifest w = load_manifest(fixture("conformal_product.json"));
  REQUIRE(w.product.has_value());
  CHECK(w.product->kind == ProductKind::Conformal);
}

TEST_CASE("manifest: error kinds and locations") {
  std::string ptr;
  try {
    load_manifest(fixture("bad_shape.json"));
    FAIL("accepted");
  } catch (const ManifestError& e) {
    CHECK(e.kind() == ManifestError::Kind::Dimension);
    CHECK(e.pointer() == "/metric/components");
  }
  try {
    load_manifest(fixture("unknown_function.json"));
    FAIL("accepted");
  } catch (const ManifestError& e) {
    CHECK(e.pointer() == "/metric/components/1/1");
    CHECK(std::string(e.what()).find("unknown identifier 'k'") != std::string::npos);
  }
  try {
    load_manifest(fixture("does_not_exist.json"));
    FAIL("accepted");
  } catch (const ManifestError& e) {
    CHECK(e.kind() == ManifestError::Kind::Io);
  }

  CHECK(error_kind("{\"chart\": ") == ManifestError::Kind::Json);
  CHECK(error_kind("[]") == ManifestError::Kind::Schema);
  CHECK(error_kind("{" + kChart + "}", &ptr) == ManifestError::Kind::Schema);
  CHECK(error_kind("{" + kChart + R"(, "metric": {"components": [["1", "0"], ["0", "1"]]}, "colour": 1})", &ptr) ==
        ManifestError::Kind::Schema);
  CHECK(ptr == "/colour");
  CHECK(error_kind("{" + kChart + R"(, "metric": {"components": [["1", "0"], ["0", "1 +"]]}})", &ptr) ==
        ManifestError::Kind::Expression);
  CHECK(ptr == "/metric/components/1/1");
  CHECK(error_kind("{" + kChart + R"(, "metric": {"components": [["1", "0"], ["0", "1"]]},
        "nets": [{"name": "n", "blocks": [[0], [1]], "expect": {"XX": true}}]})",
                   &ptr) == ManifestError::Kind::UnknownName);
  CHECK(ptr == "/nets/0/expect/XX");
  CHECK(error_kind("{" + kChart + R"(, "metric": {"components": [["1", "0"], ["0", "1"]]},
        "tensors": [{"name": "T", "components": [["1", "0"], ["0", "2"]], "h": "nope"}]})",
                   &ptr) == ManifestError::Kind::UnknownName);
  CHECK(error_kind(R"({"chart": {"names": ["x"], "domain": [[1, 0]]}, "metric": {"components": [["1"]]}})") ==
        ManifestError::Kind::Schema);
  // warped twist depending on the fibre
  CHECK_THROWS_AS(parse_manifest("{" + kChart + R"(, "product": {"kind": "warped",
        "factors": [{"metric": [["1"]]}, {"metric": [["1"]]}], "twists": ["1", "1 + y"]}})"),
                  ManifestError);
}

TEST_CASE("run: exit codes per fixture") {
  CHECK(run_fixture("polar.json", "classify").exit_code() == 0);
  CHECK(run_fixture("polar.json", "factorize").exit_code() == 0);
  CHECK(run_fixture("torus.json", "codazzi").exit_code() == 0);
  CHECK(run_fixture("torus.json", "classify").exit_code() == 0);
  CHECK(run_fixture("cone.json", "codazzi").exit_code() == 0);
  CHECK(run_fixture("isothermic.json", "codazzi").exit_code() == 0);
  CHECK(run_fixture("conformal_polar.json", "factorize").exit_code() == 0);
  CHECK(run_fixture("warped_product.json", "verify-product").exit_code() == 0);
  CHECK(run_fixture("conformal_product.json", "verify-product").exit_code() == 0);
  CHECK(run_fixture("twisted.json", "classify").exit_code() == 2);
  CHECK(run_fixture("weak_twist.json", "classify").exit_code() == 3);
}

TEST_CASE("run: argument handling") {
  CHECK_THROWS_AS(run("classify", nullptr, {}), std::invalid_argument);
  CHECK_THROWS_AS(run("flatten", nullptr, {}), std::invalid_argument);
  CHECK_FALSE(needs_manifest("selftest"));
  CHECK(needs_manifest("codazzi"));
  // verify-product needs a product section
  CHECK_THROWS(run_fixture("polar.json", "verify-product"));
}

TEST_CASE("run: overrides beat the manifest") {
  RunOptions opt;
  opt.tolerance = 1e-6;
  opt.samples = 3;
  opt.seed = 7;
  const Report r = run_fixture("polar.json", "classify", opt);
  CHECK(r.settings["tolerance"].get<double>() == 1e-6);
  CHECK(r.settings["sampling"]["random"].get<int>() == 3);
  CHECK(r.settings["sampling"]["seed"].get<std::uint64_t>() == 7);
  for (const auto& l : r.lines)
    if (l.tolerance) CHECK(*l.tolerance == 1e-6);
  const Report d = run_fixture("polar.json", "classify");
  CHECK(d.settings["tolerance"].get<double>() == 1e-8);
  CHECK(d.settings["sampling"]["random"].get<int>() == 16);
  // the weak twist passes once the tolerance is loose enough
  opt.samples.reset();
  CHECK(run_fixture("weak_twist.json", "classify", opt).exit_code() == 0);
}

TEST_CASE("report: summary and exit code") {
  Report r;
  r.command = "x";
  CHECK(r.exit_code() == 0);
  r.lines.push_back({"a", Verdict::Fails, 1.0, 1e-8, "", false});
  CHECK(r.exit_code() == 0);
  r.lines.push_back({"b", Verdict::Inconclusive, 5e-8, 1e-8, "", true});
  CHECK(r.summary() == Verdict::Inconclusive);
  CHECK(r.exit_code() == 3);
  r.lines.push_back({"c", Verdict::Fails, 1.0, 1e-8, "", true});
  CHECK(r.exit_code() == 2);
  CHECK(parse_format("json") == Format::Json);
  CHECK_THROWS(parse_format("yaml"));
}

TEST_CASE("report: number formatting") {
  ordered_json j = ordered_json::object();
  j["b"] = 0.1;
  j["a"] = std::numeric_limits<double>::quiet_NaN();
  j["c"] = std::numeric_limits<double>::infinity();
  j["n"] = 3;
  const std::string s = dump_json(j);
  CHECK(s.find("1.000000000000e-01") != std::string::npos);
  const auto back = nlohmann::ordered_json::parse(s);
  CHECK(back["a"].is_null());
  CHECK(back["c"].is_null());
  CHECK(back["n"].get<int>() == 3);
  CHECK(back.begin().key() == "b");
}

TEST_CASE("emit: json round trip and determinism") {
  const Report r = run_fixture("torus.json", "codazzi");
  const std::string a = emit(r, Format::Json);
  CHECK(a == emit(run_fixture("torus.json", "codazzi"), Format::Json));
  const auto j = nlohmann::ordered_json::parse(a);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"command", "settings", "result", "verdicts", "summary", "exit_code"});
  CHECK(j["exit_code"].get<int>() == 0);
  CHECK(j["verdicts"].size() == r.lines.size());
  CHECK_FALSE(j.contains("wall_clock_seconds"));
  RunOptions timed;
  timed.timing = true;
  CHECK(nlohmann::json::parse(emit(run_fixture("torus.json", "codazzi", timed), Format::Json))
            .contains("wall_clock_seconds"));
}

TEST_CASE("emit: text has one line per flag") {
  const std::string text = emit(run_fixture("polar.json", "classify"), Format::Text);
  int flags = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    for (const char* f : {".TP ", ".WP ", ".QW ", ".CQW ", ".CQW0 ", ".CWP ", ".CP "})
      if (line.find(std::string("radial-angular") + f) != std::string::npos) ++flags;
  CHECK(flags == 7);
  CHECK(text.find("summary: pass (exit 0)") != std::string::npos);
  CHECK(text.find("wall_clock") == std::string::npos);
}

TEST_CASE("required flags of product kinds") {
  const Manifest w = load_manifest(fixture("warped_product.json"));
  const Manifest c = load_manifest(fixture("conformal_product.json"));
  const auto wf = required_flags(*w.product);
  const auto cf = required_flags(*c.product);
  CHECK(std::find(wf.begin(), wf.end(), "WP") != wf.end());
  CHECK(std::find(cf.begin(), cf.end(), "WP") == cf.end());
  CHECK(std::find(cf.begin(), cf.end(), "CWP") != cf.end());
}
