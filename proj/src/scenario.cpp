#include "homcell/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "homcell/errors.hpp"
#include "homcell/report.hpp"

namespace homcell {

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> kTasks{"find_fixed_points", "grow_manifolds",   "find_cell",
                                               "verify_theorem_a",  "verify_theorem_a1", "sphere_check",
                                               "lefschetz_check"};
  return kTasks;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
  }
}

double number(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

double positive(const Json& obj, const std::string& key, const std::string& where) {
  const double v = number(obj, key, where);
  if (!(v > 0.0) || !std::isfinite(v)) config_error(where + "." + key + " must be positive");
  return v;
}

int integer(const Json& obj, const std::string& key, const std::string& where, int lo, int hi) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) config_error(where + "." + key + " must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    config_error(where + "." + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::string text(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_string()) config_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

Rect rect_of(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) config_error(where + " must be [xmin, xmax, ymin, ymax]");
  double c[4];
  for (int i = 0; i < 4; ++i) {
    if (!v[i].is_number()) config_error(where + " must contain numbers");
    c[i] = v[i].get<double>();
  }
  if (!(c[0] < c[1] && c[2] < c[3])) config_error(where + " must satisfy xmin < xmax and ymin < ymax");
  return {c[0], c[1], c[2], c[3]};
}

ParamTable params_of(const Json& spec, const std::string& where) {
  ParamTable p;
  if (!spec.contains("params")) return p;
  const Json& ps = spec.at("params");
  if (!ps.is_object()) config_error(where + ".params must be an object");
  for (const auto& [k, v] : ps.items()) {
    if (!v.is_number()) config_error(where + ".params." + k + " must be a number");
    p[k] = v.get<double>();
  }
  return p;
}

std::string side_of(const Json& obj, const std::string& key) {
  const std::string s = text(obj, key, "analysis");
  if (s != "plus" && s != "minus" && s != "auto") config_error("analysis." + key + " must be plus, minus or auto");
  return s;
}

}  // namespace

SmoothPlanarMap map_from_json(const Json& spec) {
  const std::string where = "map";
  check_keys(spec, {"kind", "name", "params", "fx", "fy", "gx", "gy", "T", "rect"}, where);
  if (!spec.contains("kind")) config_error("map.kind is required (builtin, expression or ode)");
  const std::string kind = text(spec, "kind", where);
  const Rect rect = spec.contains("rect") ? rect_of(spec.at("rect"), where + ".rect") : Rect{};
  const ParamTable params = params_of(spec, where);
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (spec.contains(k)) config_error(std::string("map.") + k + " is not allowed for kind " + kind);
  };
  if (kind == "builtin") {
    forbid({"fx", "fy", "gx", "gy", "T"});
    if (!spec.contains("name")) config_error("map.name is required for a builtin map");
    return builtin_map(text(spec, "name", where), params, rect);
  }
  const std::string name = spec.contains("name") ? text(spec, "name", where) : kind;
  if (!spec.contains("fx") || !spec.contains("fy")) config_error("map." + kind + " needs fx and fy");
  const std::string fx = text(spec, "fx", where), fy = text(spec, "fy", where);
  if (kind == "expression") {
    forbid({"T"});
    if (spec.contains("gx") != spec.contains("gy")) config_error("map needs both gx and gy or neither");
    std::optional<std::pair<std::string, std::string>> inv;
    if (spec.contains("gx")) inv = std::make_pair(text(spec, "gx", where), text(spec, "gy", where));
    return make_expression_map(fx, fy, params, name, inv, rect);
  }
  if (kind == "ode") {
    forbid({"gx", "gy"});
    if (!spec.contains("T")) config_error("map.T is required for an ode map");
    const double T = number(spec, "T", where);
    if (T == 0.0 || !std::isfinite(T)) config_error("map.T must be finite and nonzero");
    return make_time_T_map(make_vector_field(fx, fy, params), T, name, {}, rect);
  }
  config_error("map.kind must be builtin, expression or ode");
}

namespace {

SphereMap sphere_from_spec(const SphereSpec& s) {
  return SphereMap{map_from_json(s.north), map_from_json(s.south), s.r_in, s.r_out, s.tolerance};
}

// Builds every map once so that bad map specs surface as configuration errors.
void validate_maps(const ScenarioConfig& c) {
  try {
    if (!c.map.is_null()) map_from_json(c.map);
    if (c.sphere) sphere_from_spec(*c.sphere);
  } catch (const ParseError& e) {
    throw ParseError(e.offset(), e.expected(), "map expression: " + std::string(e.what()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("map: ") + e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& source) {
  Json j;
  try {
    j = Json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte > 0 ? e.byte - 1 : 0, {}, std::string("malformed config: ") + e.what());
  }
  ScenarioConfig c;
  c.source_text = source;
  try {
    check_keys(j, {"name", "description", "map", "sphere", "analysis", "tasks", "output"}, "config");
    c.name = j.contains("name") ? text(j, "name", "config") : "scenario";
    if (j.contains("description") && !j.at("description").is_string()) config_error("config.description must be a string");
    if (j.contains("map")) c.map = j.at("map");
    if (j.contains("sphere")) {
      const Json& s = j.at("sphere");
      check_keys(s, {"north", "south", "r_in", "r_out", "tolerance"}, "sphere");
      SphereSpec sp;
      sp.north = s.at("north");
      sp.south = s.at("south");
      sp.r_in = positive(s, "r_in", "sphere");
      sp.r_out = positive(s, "r_out", "sphere");
      if (!(sp.r_out > sp.r_in)) config_error("sphere.r_out must exceed sphere.r_in");
      if (s.contains("tolerance")) sp.tolerance = positive(s, "tolerance", "sphere");
      c.sphere = sp;
    }
    if (c.map.is_null() && !c.sphere) config_error("config needs a 'map' or a 'sphere'");
    if (c.map.is_null()) c.map = c.sphere->north;

    AnalysisSettings& a = c.analysis;
    if (j.contains("analysis")) {
      const Json& an = j.at("analysis");
      const std::string w = "analysis";
      check_keys(an, {"region", "grid", "seed_grid", "saddle", "seed_delta", "target_arclength", "h_max", "alpha_max",
                      "max_param_step", "max_domains", "unstable_side", "stable_side", "homoclinic_point",
                      "exclusion_radius", "overlap_tolerance", "tangency_sin", "dedup_tolerance",
                      "residual_tolerance", "n_max", "a1_r", "erosion", "band", "sphere_grid",
                      "perturbation", "perturbation_directions"},
                 w);
      if (an.contains("region")) a.region = rect_of(an.at("region"), "analysis.region");
      if (an.contains("grid")) a.grid = integer(an, "grid", w, 2, 4000);
      if (an.contains("seed_grid")) a.seed_grid = integer(an, "seed_grid", w, 20, 4000);
      if (an.contains("saddle")) {
        const Json& s = an.at("saddle");
        if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
          config_error("analysis.saddle must be [x, y]");
        a.saddle = Vec2{s[0].get<double>(), s[1].get<double>()};
      }
      if (an.contains("seed_delta")) a.seed_delta = positive(an, "seed_delta", w);
      if (an.contains("target_arclength")) a.growth.target_arclength = positive(an, "target_arclength", w);
      if (an.contains("h_max")) a.growth.h_max = positive(an, "h_max", w);
      if (an.contains("alpha_max")) a.growth.alpha_max = positive(an, "alpha_max", w);
      if (an.contains("max_param_step")) a.growth.max_param_step = positive(an, "max_param_step", w);
      if (an.contains("max_domains")) a.growth.max_domains = integer(an, "max_domains", w, 1, 100000);
      if (an.contains("unstable_side")) a.unstable_side = side_of(an, "unstable_side");
      if (an.contains("stable_side")) a.stable_side = side_of(an, "stable_side");
      if (an.contains("homoclinic_point")) a.homoclinic_point = integer(an, "homoclinic_point", w, 0, 1000000);
      if (an.contains("exclusion_radius")) a.homoclinic.exclusion_radius = positive(an, "exclusion_radius", w);
      if (an.contains("tangency_sin")) a.homoclinic.tangency_sin = positive(an, "tangency_sin", w);
      if (an.contains("dedup_tolerance")) a.dedup_tolerance = positive(an, "dedup_tolerance", w);
      if (an.contains("residual_tolerance")) a.residual_tolerance = positive(an, "residual_tolerance", w);
      if (an.contains("overlap_tolerance")) a.homoclinic.overlap_tolerance = positive(an, "overlap_tolerance", w);
      if (an.contains("n_max")) a.n_max = integer(an, "n_max", w, 1, 16);
      if (an.contains("a1_r")) a.a1_r = integer(an, "a1_r", w, 0, 3);
      if (an.contains("erosion")) a.erosion = positive(an, "erosion", w);
      if (an.contains("band")) a.band = positive(an, "band", w);
      if (an.contains("sphere_grid")) a.sphere_grid = integer(an, "sphere_grid", w, 2, 4000);
      if (an.contains("perturbation")) a.perturbation = positive(an, "perturbation", w);
      if (an.contains("perturbation_directions"))
        a.perturbation_directions = integer(an, "perturbation_directions", w, 1, 64);
    }
    if (!j.contains("tasks") || !j.at("tasks").is_array() || j.at("tasks").empty())
      config_error("config.tasks must be a non-empty list");
    for (const Json& t : j.at("tasks")) {
      if (!t.is_string()) config_error("tasks must be strings");
      const std::string name = t.get<std::string>();
      const auto& known = known_tasks();
      if (std::find(known.begin(), known.end(), name) == known.end()) config_error("unknown task '" + name + "'");
      if (name == "sphere_check" && !c.sphere) config_error("task sphere_check needs a 'sphere' block");
      c.tasks.push_back(name);
    }
    if (j.contains("output")) c.output = text(j, "output", "config");
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("invalid config: ") + e.what());
  }
  validate_maps(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

using Clock = std::chrono::steady_clock;

enum class Status { kOk, kMismatch, kCertification, kConfig, kHypothesis };

const char* status_name(Status s) {
  switch (s) {
    case Status::kOk: return "ok";
    case Status::kMismatch: return "mismatch";
    case Status::kCertification: return "certification_failure";
    case Status::kConfig: return "config_error";
    case Status::kHypothesis: return "hypothesis_unmet";
  }
  return "?";
}

struct Pipeline {
  const ScenarioConfig& cfg;
  AnalysisSettings a;
  SmoothPlanarMap f;
  std::optional<SphereMap> g;
  RunResult& out;
  Json tasks = Json::array();
  Json timings = Json::object();
  std::vector<Status> statuses;

  Pipeline(const ScenarioConfig& c, AnalysisSettings settings, RunResult& r)
      : cfg(c), a(std::move(settings)), f(map_from_json(c.map)), out(r) {}

  bool have_fps = false;
  std::vector<FixedPointRecord> fps;
  std::optional<FixedPointRecord> saddle;
  std::vector<ManifoldBranch> branches;  // unstable plus, unstable minus, stable plus, stable minus
  std::shared_ptr<const HomoclinicCell> cell;
  std::optional<TotalIndexReport> total;

  FixedPointSearchOptions search_options(FixedPointSearchOptions s = {}) const {
    s.dedup_tolerance = a.dedup_tolerance;
    s.residual_tolerance = a.residual_tolerance;
    return s;
  }

  BlockOptions block_options() const {
    BlockOptions o;
    o.search = search_options(o.search);
    o.grid = a.seed_grid;
    o.band = a.band;
    o.erosion = a.erosion;
    return o;
  }

  void record(const std::string& name, bool implicit, Status st, Json result, const std::string& diag, double secs) {
    Json t;
    t["task"] = name;
    t["implicit"] = implicit;
    t["status"] = status_name(st);
    t["result"] = std::move(result);
    t["diagnostic"] = diag;
    tasks.push_back(std::move(t));
    std::string key = name;
    for (int k = 2; timings.contains(key); ++k) key = name + "#" + std::to_string(k);
    timings[key] = secs;
    statuses.push_back(st);
  }

  // Runs `body` as a task entry; errors become the task's status and stop the pipeline.
  void run(const std::string& name, bool implicit, const std::function<Status(Json&, std::string&)>& body) {
    const auto t0 = Clock::now();
    Json result = Json::object();
    std::string diag;
    Status st = Status::kOk;
    try {
      st = body(result, diag);
    } catch (const Error& e) {
      diag = name + ": " + error_code_name(e.code()) + ": " + e.what();
      if (e.code() == ErrorCode::kHypothesisUnmet) st = Status::kHypothesis;
      else if (is_certification_failure(e.code()) || e.code() == ErrorCode::kDomain) st = Status::kCertification;
      else st = Status::kConfig;
      record(name, implicit, st, std::move(result), diag, std::chrono::duration<double>(Clock::now() - t0).count());
      out.summary.push_back(name + ": " + status_name(st) + " (" + diag + ")");
      throw Stop{};
    }
    record(name, implicit, st, std::move(result), diag, std::chrono::duration<double>(Clock::now() - t0).count());
  }

  struct Stop {};

  void ensure_fixed_points() {
    if (!have_fps) task_fixed_points(true);
  }
  void ensure_branches() {
    if (branches.empty()) task_manifolds(true);
  }
  void ensure_cell() {
    if (!cell) task_cell(true);
  }

  void task_fixed_points(bool implicit) {
    run("find_fixed_points", implicit, [&](Json& r, std::string& diag) {
      SearchDiagnostics d;
      fps = find_periodic_points(f, 1, a.region, a.grid, search_options(), &d);
      Status st = Status::kOk;
      for (auto& rec : fps) {
        try {
          rec.index = index_at_point(f, 1, rec.location);
        } catch (const Error& e) {
          st = Status::kCertification;
          diag += std::string(error_code_name(e.code())) + " at (" + std::to_string(rec.location.x) + ", " +
                  std::to_string(rec.location.y) + "); ";
        }
      }
      have_fps = true;
      Json list = Json::array();
      for (const auto& rec : fps) list.push_back(fixed_point_json(rec));
      r["fixed_points"] = list;
      r["grid"] = a.grid;
      r["newton_runs"] = d.newton_runs;
      r["max_residual"] = d.max_residual;
      out.summary.push_back("find_fixed_points: " + std::to_string(fps.size()) + " fixed point(s)");
      return st;
    });
  }

  void task_manifolds(bool implicit) {
    ensure_fixed_points();
    run("grow_manifolds", implicit, [&](Json& r, std::string&) {
      std::vector<const FixedPointRecord*> saddles;
      for (const auto& rec : fps)
        if (rec.cls == FixedPointClass::kDirectSaddle) saddles.push_back(&rec);
      if (saddles.empty()) throw Error(ErrorCode::kNotASaddle, "no direct saddle found in the search region");
      const FixedPointRecord* pick = saddles.front();
      if (a.saddle) {
        for (const auto* s : saddles)
          if (distance(s->location, *a.saddle) < distance(pick->location, *a.saddle)) pick = s;
      }
      saddle = *pick;
      branches.clear();
      for (BranchKind k : {BranchKind::kUnstable, BranchKind::kStable})
        for (BranchSide s : {BranchSide::kPlus, BranchSide::kMinus})
          branches.push_back(grow_branch(seed_branch(f, *pick, k, s, a.seed_delta), a.growth));
      r["saddle"] = fixed_point_json(*pick);
      Json list = Json::array();
      for (const auto& b : branches) list.push_back(branch_json(b));
      r["branches"] = list;
      std::ostringstream s;
      s << "grow_manifolds: saddle (" << pick->location.x << ", " << pick->location.y << "), vertices";
      for (const auto& b : branches) s << " " << b.polyline.size();
      out.summary.push_back(s.str());
      return Status::kOk;
    });
  }

  const ManifoldBranch& branch(BranchKind k, BranchSide s) const {
    return branches[(k == BranchKind::kUnstable ? 0 : 2) + (s == BranchSide::kPlus ? 0 : 1)];
  }

  void task_cell(bool implicit) {
    ensure_branches();
    run("find_cell", implicit, [&](Json& r, std::string&) {
      std::vector<BranchSide> us, ss;
      for (BranchSide s : {BranchSide::kPlus, BranchSide::kMinus}) {
        if (a.unstable_side == "auto" || a.unstable_side == branch_side_name(s)) us.push_back(s);
        if (a.stable_side == "auto" || a.stable_side == branch_side_name(s)) ss.push_back(s);
      }
      for (BranchSide su : us) {
        for (BranchSide sv : ss) {
          const ManifoldBranch& wu = branch(BranchKind::kUnstable, su);
          const ManifoldBranch& ws = branch(BranchKind::kStable, sv);
          const auto all = find_homoclinic_points(wu, ws, a.homoclinic);
          if (all.empty()) continue;
          // transversal crossings come first; coincident or tangential points only when there are none
          std::vector<HomoclinicPoint> pts;
          for (const auto& h : all)
            if (h.transversal) pts.push_back(h);
          if (pts.empty()) pts = all;
          if (a.homoclinic_point >= static_cast<int>(pts.size()))
            throw Error(ErrorCode::kNoHomoclinicPoint, "homoclinic point " + std::to_string(a.homoclinic_point) +
                                                           " requested but only " + std::to_string(pts.size()) + " found");
          const HomoclinicLoop loop = build_simple_loop(pts[a.homoclinic_point], wu, ws, a.homoclinic);
          cell = std::make_shared<const HomoclinicCell>(cell_from_loop(loop, wu.direction, ws.direction));
          r["unstable_side"] = branch_side_name(su);
          r["stable_side"] = branch_side_name(sv);
          r["homoclinic_point_count"] = all.size();
          r["candidates"] = pts.size() == all.size() ? "all" : "transversal";
          Json list = Json::array();
          for (std::size_t i = 0; i < pts.size() && i < 50; ++i) list.push_back(homoclinic_point_json(pts[i]));
          r["homoclinic_points"] = list;
          r["chosen"] = a.homoclinic_point;
          r["cell"] = cell_json(*cell);
          out.summary.push_back(std::string("find_cell: ") + cell_sign_name(cell->sign) + " cell, rho = " +
                                std::to_string(cell->rho) + ", area " + std::to_string(cell->area));
          return Status::kOk;
        }
      }
      throw Error(ErrorCode::kNoHomoclinicPoint, "no homoclinic point found between the grown branches");
    });
  }

  void task_theorem_a(bool implicit) {
    ensure_cell();
    run("verify_theorem_a", implicit, [&](Json& r, std::string& diag) {
      const auto reports = verify_theorem_A(f, cell, a.n_max, block_options());
      Json list = Json::array();
      bool mismatch = false, uncertain = false;
      out.summary.push_back("verify_theorem_a:   n  #orbits  block  rho  verdict");
      for (const auto& b : reports) {
        list.push_back(block_json(b));
        if (b.verdict == "mismatch") mismatch = true;
        if (b.verdict == "non_certifiable") uncertain = true;
        char line[128];
        std::snprintf(line, sizeof line, "                  %3d  %7zu  %5s  %3d  %s", b.n, b.orbits.size(),
                      b.block_index ? std::to_string(*b.block_index).c_str() : "-", b.rho, b.verdict.c_str());
        out.summary.push_back(line);
      }
      r["rho"] = cell->rho;
      r["blocks"] = list;
      if (mismatch) diag = "block index differs from rho for some n";
      else if (uncertain) diag = "some n could not be certified";
      return mismatch ? Status::kMismatch : uncertain ? Status::kCertification : Status::kOk;
    });
  }

  void task_theorem_a1(bool implicit) {
    ensure_cell();
    run("verify_theorem_a1", implicit, [&](Json& r, std::string& diag) {
      const TheoremA1Report rep = verify_theorem_A1(f, cell, a.a1_r, block_options());
      r = a1_json(rep);
      out.summary.push_back("verify_theorem_a1: " + rep.verdict);
      if (rep.verdict == "not_confirmed") {
        diag = "neither alternative found";
        return rep.search_complete ? Status::kMismatch : Status::kCertification;
      }
      return Status::kOk;
    });
  }

  SphereSearchOptions sphere_options() const {
    SphereSearchOptions o;
    o.grid = a.sphere_grid;
    o.search = search_options(o.search);
    return o;
  }

  void task_sphere(bool implicit) {
    run("sphere_check", implicit, [&](Json& r, std::string& diag) {
      const ChartCheck cc = check_chart_consistency(*g);
      r["chart_consistency"] = {{"ok", cc.ok}, {"max_error", cc.max_error}, {"samples", cc.samples}};
      if (!cc.ok) throw Error(ErrorCode::kChartInconsistency, cc.detail);
      total = total_index(*g, sphere_options());
      r["total_index"] = total_index_json(*total);
      bool ok = total->total == 2 && total->circle_degree == 2;
      if (!ok) diag += "total index differs from 2; ";
      if (cell) {
        const ComponentIndexReport ci = component_indices(*g, *cell, a.erosion);
        r["components"] = components_json(ci);
        if (!ci.is_one_two || !ci.sums_to_two) {
          ok = false;
          diag += "component indices are not {1, 2}; ";
        }
        const ThreeFixedPointReport th =
            three_fixed_points_check(*g, a.perturbation, a.perturbation_directions, sphere_options());
        r["three_fixed_points"] = three_points_json(th);
        if (!th.satisfied) {
          ok = false;
          diag += "a perturbation has fewer than 3 fixed points; ";
        }
      }
      out.summary.push_back("sphere_check: total index " + std::to_string(total->total) + (ok ? " (ok)" : " (mismatch)"));
      return ok ? Status::kOk : Status::kMismatch;
    });
  }

  void task_lefschetz(bool implicit) {
    ensure_cell();
    if (!g) ensure_fixed_points();
    run("lefschetz_check", implicit, [&](Json& r, std::string& diag) {
      std::vector<IndexedFixedPoint> pts;
      if (g) {
        if (!total) total = total_index(*g, sphere_options());
        pts = indexed_points(*total);
        r["source"] = "sphere";
      } else {
        for (const auto& rec : fps) {
          if (!rec.index) throw Error(ErrorCode::kNotIsolated, "a fixed point has no certified index");
          pts.push_back({rec.location, false, *rec.index});
        }
        r["source"] = "planar_search_region";
      }
      const LefschetzReport rep = lefschetz_bound_check(pts, *cell);
      r["report"] = lefschetz_json(rep);
      diag = rep.diagnostic;
      out.summary.push_back("lefschetz_check: #Fix " + std::to_string(rep.fixed_points) + " >= bound " +
                            std::to_string(rep.bound) + (rep.satisfied ? " (ok)" : " (violated)"));
      return rep.satisfied ? Status::kOk : Status::kMismatch;
    });
  }
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  RunResult out;
  const auto t0 = Clock::now();
  AnalysisSettings a = cfg.analysis;
  if (opts.seed_grid) {
    if (*opts.seed_grid < 20) throw Error(ErrorCode::kConfig, "--seed-grid must be >= 20");
    a.seed_grid = *opts.seed_grid;
  }
  Pipeline p(cfg, a, out);
  if (cfg.sphere) p.g = sphere_from_spec(*cfg.sphere);
  out.region = a.region;
  try {
    for (const std::string& t : cfg.tasks) {
      if (t == "find_fixed_points") p.task_fixed_points(false);
      else if (t == "grow_manifolds") p.task_manifolds(false);
      else if (t == "find_cell") p.task_cell(false);
      else if (t == "verify_theorem_a") p.task_theorem_a(false);
      else if (t == "verify_theorem_a1") p.task_theorem_a1(false);
      else if (t == "sphere_check") p.task_sphere(false);
      else if (t == "lefschetz_check") p.task_lefschetz(false);
    }
  } catch (const Pipeline::Stop&) {
  }

  bool mismatch = false, cert = false, conf = false;
  for (Status s : p.statuses) {
    if (s == Status::kMismatch || s == Status::kHypothesis) mismatch = true;
    if (s == Status::kCertification) cert = true;
    if (s == Status::kConfig) conf = true;
  }
  out.exit_code = conf ? kExitConfig : mismatch ? kExitMismatch : cert ? kExitCertification : kExitOk;

  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(cfg.source_text)));
  Json& r = out.report;
  r["tool"] = "homcell";
  r["version"] = kToolVersion;
  r["scenario"] = cfg.name;
  r["config_hash"] = hash;
  r["map"] = {{"name", p.f.name()}, {"kind", map_kind_name(p.f.kind())}, {"params", p.f.params()}};
  r["tasks"] = std::move(p.tasks);
  r["exit_code"] = out.exit_code;
  r["verdict"] = out.exit_code == kExitOk ? "ok"
                 : out.exit_code == kExitMismatch ? "mismatch"
                 : out.exit_code == kExitConfig ? "config_error"
                                                : "certification_failure";
  p.timings["total"] = std::chrono::duration<double>(Clock::now() - t0).count();
  r["timings"] = std::move(p.timings);

  out.fixed_points = p.fps;
  out.branches = p.branches;
  out.cell = p.cell;
  return out;
}

Json strip_timings(Json report) {
  report.erase("timings");
  return report;
}

void write_artifacts(const RunResult& res, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream o(dir / "report.json", std::ios::binary);
    o << res.report.dump(2) << "\n";
    if (!o) throw Error(ErrorCode::kConfig, "cannot write " + (dir / "report.json").string());
  }
  if (!res.branches.empty()) {
    fs::create_directories(dir / "branches");
    for (const auto& b : res.branches) {
      const std::string name = std::string(branch_kind_name(b.kind)) + "_" + branch_side_name(b.side) + ".csv";
      std::ofstream o(dir / "branches" / name, std::ios::binary);
      o << branch_csv(b);
    }
  }
  PortraitInput in;
  in.view = res.region;
  for (const auto& b : res.branches) in.branches.push_back(&b);
  in.cell = res.cell.get();
  in.fixed_points = res.fixed_points;
  if (!in.branches.empty() || in.cell || !in.fixed_points.empty()) {
    std::ofstream o(dir / "portrait.svg", std::ios::binary);
    o << render_portrait(in);
  }
}

}  // namespace homcell
