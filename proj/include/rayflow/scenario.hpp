#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rayflow/graph.hpp"
#include "rayflow/models.hpp"
#include "rayflow/sim.hpp"

namespace rayflow {

struct ChecksRequest {
  std::vector<std::string> properties;
  long long samples = 10000;
  std::uint64_t seed = 0;
  double tol = 1e-12;
};

struct AnalysisRequest {
  bool positivity = false;
  bool box = false;
  bool lyapunov = false;
  std::optional<double> dini_c_max;       // set when the dini analysis is requested
  std::optional<double> consensus_epsilon;
  std::optional<ChecksRequest> checks;
};

struct RandomizeSpec {
  bool enabled = false;
  double lo = 1e-2;  // per-component log-uniform bounds for sweep draws
  double hi = 1e2;
};

/// Parsed and validated scenario: model, initial state, integrator config
/// and the analyses to run. Validation failures raise ConfigError with the
/// offending location; they map to exit code 2 in the CLI.
struct Scenario {
  std::string name;
  std::string model_kind;  // linear | ratio | laplacian | composite
  ModelPtr model;
  std::optional<DynamicGraph> graph;
  DensityVector initial;
  int vertex_block = 0;  // composite: leading state entries that are vertices
  bool laplacian_symmetric = false;
  IntegratorConfig integrator;
  AnalysisRequest analyses;
  RandomizeSpec randomize;
};

/// Loads and validates a scenario file (JSON). Parse errors carry the line.
Scenario load_scenario(const std::string& path);

/// Same, from in-memory text; origin only labels error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin);

/// Named models for the check subcommand: "linear:demo",
/// "linear:neg-offdiag", "ratio:n<K>", "ratio:two-block", "laplacian:n<K>",
/// or "@file.json" for a scenario file's model section.
ModelPtr make_named_model(const std::string& spec);

std::vector<std::string> demo_names();

/// Scenario text (JSON) for a built-in demo; ConfigError for unknown names.
/// "laplacian-vs-ratio" is a paired demo handled by the runner and has no
/// single scenario.
std::string demo_scenario_text(const std::string& name);

}  // namespace rayflow
