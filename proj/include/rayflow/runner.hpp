#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rayflow/checkers.hpp"
#include "rayflow/scenario.hpp"
#include "rayflow/sim.hpp"
#include "rayflow/trajectory_analysis.hpp"

namespace rayflow {

/// Exit-code contract, shared by the library entry points and the CLI:
/// 0 success, 1 analysis failure, 2 usage or validation error (raised as
/// ConfigError/StructuralError/DomainError and mapped by the caller).
struct RunResult {
  int exit_code = 0;
  std::vector<std::string> failed;  // names of failed analyses
  nlohmann::ordered_json summary;
  std::shared_ptr<Trajectory> trajectory;
};

/// Integrates the scenario, runs its analyses and, when out_dir is
/// nonempty, writes trajectory.csv, distance.csv, summary.json, the SVG
/// plots and one report per requested check.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir);

struct CheckOutcome {
  int exit_code = 0;
  nlohmann::ordered_json report;
};

/// The check subcommand: property is one of gs, strong-gs, class-n,
/// homogeneity, a5, lemma1, equilibria-scan.
CheckOutcome run_check(const ModelPtr& model, const std::string& property,
                       const CheckConfig& cfg, int grid);

struct SweepResult {
  int exit_code = 0;
  nlohmann::ordered_json aggregate;
};

/// Randomized replicates of a scenario (initial states drawn log-uniformly
/// within the scenario's randomize bounds), run concurrently, aggregated
/// deterministically by run index.
SweepResult run_sweep(const Scenario& scenario, int n_runs, std::uint64_t seed,
                      const std::string& out_dir);

/// Built-in demos; writes scenario.json plus run artifacts under out_dir.
/// laplacian-vs-ratio runs both systems and emits comparison.json.
int run_demo(const std::string& name, const std::string& out_dir);

nlohmann::ordered_json check_report_json(const CheckReport& report);
nlohmann::ordered_json scan_report_json(const ScanReport& report);
nlohmann::ordered_json comparison_json(const ComparisonRecord& record);

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          int vertex_block);
void write_distance_csv(const std::string& path, const LyapunovSeries& series);

}  // namespace rayflow
