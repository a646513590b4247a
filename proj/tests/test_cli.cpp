#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "homcell/report.hpp"
#include "homcell/scenario.hpp"

using namespace homcell;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "homcell_cli_test.log";
  const std::string cmd = std::string(HOMCELL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

std::string scenario(const std::string& name) { return std::string(HOMCELL_SOURCE_DIR) + "/scenarios/" + name; }

int config_error_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ParseError&) {
    return 1;
  } catch (const Error& e) {
    return e.code() == ErrorCode::kConfig ? 2 : 3;
  }
  return 0;
}

const std::string kMinimal =
    R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "tasks": ["find_fixed_points"]})";

}  // namespace

TEST_CASE("config validation") {
  CHECK(config_error_code(kMinimal) == 0);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle"}, "tasks": [)") == 1);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "tasks": ["find_fixed_points"], "colour": 1})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "analysis": {"h_max": -1}, "tasks": ["grow_manifolds"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "analysis": {"grdi": 3}, "tasks": ["grow_manifolds"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "tasks": ["fly"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "tasks": ["sphere_check"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "nope"}, "tasks": ["find_fixed_points"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "expression", "fx": "x +", "fy": "y"}, "tasks": ["find_fixed_points"]})") == 1);
  CHECK(config_error_code(R"({"map": {"kind": "ode", "fx": "y", "fy": "-x"}, "tasks": ["find_fixed_points"]})") == 2);
  CHECK(config_error_code(R"({"map": {"kind": "builtin", "name": "linear_saddle", "params": {"lambda": 0.5, "mu": 2}}, "analysis": {"n_max": 40}, "tasks": ["verify_theorem_a"]})") == 2);
}

TEST_CASE("malformed JSON reports the byte offset") {
  try {
    parse_scenario("{\"name\": \"x\",\n \"tasks\": [1,,]}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 10);
    CHECK(e.offset() < 30);
  }
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("cli: zoo lists the built-in maps") {
  const auto r = run_cli("zoo");
  CHECK(r.code == 0);
  for (const auto& e : builtin_zoo()) CHECK(r.output.find(e.name) != std::string::npos);
}

TEST_CASE("cli: malformed config exits 2 with an offset") {
  const auto p = write_temp("homcell_bad.json", "{\"map\": {\"kind\": \"builtin\"}, \"tasks\": [ ");
  const auto r = run_cli("run " + p.string() + " --out " + (fs::temp_directory_path() / "homcell_bad").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("byte") != std::string::npos);
}

TEST_CASE("cli: unknown key and missing file exit 2") {
  const auto p = write_temp("homcell_unknown.json", kMinimal.substr(0, kMinimal.size() - 1) + ", \"extra\": 1}");
  CHECK(run_cli("run " + p.string()).code == 2);
  CHECK(run_cli("run /nonexistent/config.json").code == 2);
  CHECK(run_cli("run").code == 2);
}

TEST_CASE("cli: theorem A without a homoclinic point exits 3") {
  const fs::path out = fs::temp_directory_path() / "homcell_linear";
  const auto r = run_cli("run " + scenario("linear_saddle.json") + " --out " + out.string());
  CHECK(r.code == 3);
  CHECK(r.output.find("no homoclinic point found") != std::string::npos);
  CHECK(fs::exists(out / "report.json"));
  const std::string svg = [&] {
    std::ifstream in(out / "portrait.svg");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  // four straight branches through the origin: two lines
  const std::regex poly("<polyline class=\"(wu|ws)\" data-side=\"[a-z]+\" points=\"([^\"]*)\"");
  int n = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    ++n;
    std::istringstream pts((*it)[2].str());
    std::string tok;
    double x0 = 0, y0 = 0, x = 0, y = 0;
    bool first = true, straight_h = true, straight_v = true;
    while (pts >> tok) {
      std::sscanf(tok.c_str(), "%lf,%lf", &x, &y);
      if (first) {
        x0 = x, y0 = y, first = false;
      }
      straight_h = straight_h && std::abs(y - y0) < 0.01;
      straight_v = straight_v && std::abs(x - x0) < 0.01;
    }
    CHECK((straight_h || straight_v));
  }
  CHECK(n == 4);
}

TEST_CASE("cli: shipped duffing scenario exits 0 with block indices 1") {
  const fs::path out = fs::temp_directory_path() / "homcell_duffing";
  fs::remove_all(out);
  const auto r = run_cli("run " + scenario("duffing_lobe.json") + " --out " + out.string() + " --seed-grid 120");
  REQUIRE(r.code == 0);
  std::ifstream in(out / "report.json");
  const Json rep = Json::parse(in);
  CHECK(rep["exit_code"] == 0);
  bool saw = false;
  for (const auto& t : rep["tasks"]) {
    if (t["task"] != "verify_theorem_a") continue;
    saw = true;
    CHECK(t["result"]["rho"] == 1);
    int n = 1;
    for (const auto& b : t["result"]["blocks"]) {
      CHECK(b["n"] == n++);
      CHECK(b["block_index"] == 1);
    }
    CHECK(n == 5);
  }
  CHECK(saw);
  for (const char* f : {"unstable_plus.csv", "unstable_minus.csv", "stable_plus.csv", "stable_minus.csv"})
    CHECK(fs::exists(out / "branches" / f));
}

TEST_CASE("portrait of the duffing lobe") {
  const auto& d = fixtures::duffing_lobe();
  PortraitInput in;
  in.view = Rect{-2, 2, -1.5, 1.5};
  in.branches = {&d.wu, &d.ws};
  in.cell = d.cell.get();
  in.fixed_points = {d.saddle, make_record(d.f, 1, {1, 0})};
  const std::string svg = render_portrait(in);
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("<polygon class=\"cell\"") == 1);
  CHECK(count("class=\"wu\"") == 1);
  CHECK(count("class=\"ws\"") == 1);
  CHECK(count("class=\"fp direct_saddle\"") == 1);
  CHECK(count("class=\"fp elliptic\"") == 1);
  // the shaded lobe spans x in [0, sqrt 2]: pixels [400, 400 + 200 sqrt 2]
  const auto a = svg.find("<polygon class=\"cell\" points=\"");
  std::istringstream pts(svg.substr(a + 30, svg.find('"', a + 30) - a - 30));
  std::string tok;
  double xmin = 1e9, xmax = -1e9;
  while (pts >> tok) {
    double x, y;
    std::sscanf(tok.c_str(), "%lf,%lf", &x, &y);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  CHECK(xmin == doctest::Approx(400).epsilon(0.002));
  CHECK(xmax == doctest::Approx(400 + 200 * std::sqrt(2.0)).epsilon(0.002));
  CHECK(render_portrait(in) == svg);
  CHECK_THROWS_AS(render_portrait(PortraitInput{}), Error);
}

TEST_CASE("reports are reproducible apart from timings") {
  const auto cfg = load_scenario(scenario("north_south_sphere.json"));
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  CHECK(a.report.contains("timings"));
  CHECK(strip_timings(a.report).dump() == strip_timings(b.report).dump());
}
