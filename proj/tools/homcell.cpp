// homcell command-line tool.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "homcell/errors.hpp"
#include "homcell/map_model.hpp"
#include "homcell/scenario.hpp"

namespace {

int print_zoo() {
  for (const auto& e : homcell::builtin_zoo()) {
    std::cout << e.name << "\n  " << e.description << "\n";
    for (const auto& p : e.params) {
      std::cout << "    " << p.name;
      if (p.default_value) std::cout << " = " << *p.default_value;
      if (!p.constraint.empty()) std::cout << "  (" << p.constraint << ")";
      std::cout << "\n";
    }
  }
  return 0;
}

int run(const std::string& config_path, const std::string& out_dir, std::optional<int> seed_grid, bool quiet) {
  using namespace homcell;
  ScenarioConfig cfg;
  try {
    cfg = load_scenario(config_path);
  } catch (const ParseError& e) {
    std::cerr << "homcell: config error at byte " << e.offset() << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "homcell: config error: " << e.what() << "\n";
    return kExitConfig;
  }
  RunOptions opts;
  opts.seed_grid = seed_grid;
  RunResult res;
  try {
    res = run_scenario(cfg, opts);
  } catch (const Error& e) {
    std::cerr << "homcell: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kInvalidArgument ? kExitConfig
                                                                                     : kExitCertification;
  }
  std::filesystem::path dir = out_dir;
  if (dir.empty()) dir = cfg.output.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(cfg.output);
  try {
    write_artifacts(res, dir);
  } catch (const std::exception& e) {
    std::cerr << "homcell: cannot write artifacts: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!quiet) {
    std::cout << "scenario " << cfg.name << "\n";
    for (const auto& line : res.summary) std::cout << "  " << line << "\n";
    std::cout << "verdict: " << res.report["verdict"].get<std::string>() << " (exit " << res.exit_code << ")\n";
    std::cout << "artifacts: " << dir.string() << "\n";
  }
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homcell: fixed-point indices of homoclinic cells"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int seed_grid = 0;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "run a scenario config");
  run_cmd->add_option("config", config_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  auto* sg = run_cmd->add_option("--seed-grid", seed_grid, "override the periodic-orbit seed grid")->check(CLI::Range(20, 4000));
  run_cmd->add_flag("--quiet", quiet, "suppress the summary");

  auto* zoo_cmd = app.add_subcommand("zoo", "list built-in maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : homcell::kExitConfig;
  }
  if (zoo_cmd->parsed()) return print_zoo();
  std::optional<int> grid;
  if (sg->count() > 0) grid = seed_grid;
  return run(config_path, out_dir, grid, quiet);
}
