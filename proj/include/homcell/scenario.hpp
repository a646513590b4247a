#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "homcell/fixed_points.hpp"
#include "homcell/homoclinic.hpp"
#include "homcell/manifolds.hpp"
#include "homcell/map_model.hpp"
#include "homcell/periodic_cell.hpp"
#include "homcell/sphere.hpp"

namespace homcell {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitCertification = 3 };

struct AnalysisSettings {
  Rect region{-2.0, 2.0, -2.0, 2.0};
  int grid = 100;        // fixed-point search grid
  double dedup_tolerance = 1e-6;
  double residual_tolerance = 1e-10;
  int seed_grid = 200;   // V_n seeding grid
  std::optional<Vec2> saddle;  // pick the direct saddle nearest to this point
  double seed_delta = 1e-6;
  GrowthOptions growth;
  std::string unstable_side = "auto";
  std::string stable_side = "auto";
  int homoclinic_point = 0;  // position among transversal crossings by t_u (all points when none)
  HomoclinicOptions homoclinic;
  int n_max = 4;
  int a1_r = 2;
  double erosion = 1e-4;
  double band = 1e-9;
  int sphere_grid = 200;
  double perturbation = 1e-3;
  int perturbation_directions = 4;
};

struct SphereSpec {
  Json north;
  Json south;
  double r_in = 0.5;
  double r_out = 2.0;
  double tolerance = 1e-8;
};

struct ScenarioConfig {
  std::string name;
  Json map;  // null when the scenario only has a sphere (the north chart is used)
  std::optional<SphereSpec> sphere;
  AnalysisSettings analysis;
  std::vector<std::string> tasks;
  std::string output;
  std::string source_text;
};

const std::vector<std::string>& known_tasks();

// Throws ParseError (with byte offset) for malformed JSON and Error(kConfig) for invalid
// content; unknown keys are rejected at every level.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

// {"kind": "builtin", "name", "params"} | {"kind": "expression", "fx", "fy", ["gx", "gy"], "params"}
// | {"kind": "ode", "fx", "fy", "T", "params"}; each may carry "rect": [xmin, xmax, ymin, ymax].
SmoothPlanarMap map_from_json(const Json& spec);

std::uint64_t fnv1a64(const std::string& bytes);

struct RunOptions {
  std::optional<int> seed_grid;
};

struct RunResult {
  int exit_code = kExitOk;
  Json report;
  std::vector<std::string> summary;  // human-readable lines
  // Artifacts for CSV / SVG output.
  Rect region;
  std::vector<FixedPointRecord> fixed_points;
  std::vector<ManifoldBranch> branches;
  std::shared_ptr<const HomoclinicCell> cell;
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// report.json, branches/*.csv and portrait.svg under `dir`.
void write_artifacts(const RunResult& result, const std::filesystem::path& dir);

// Report without the timing block, for reproducibility comparisons.
Json strip_timings(Json report);

}  // namespace homcell
