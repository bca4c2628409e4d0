#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rayflow/errors.hpp"
#include "rayflow/runner.hpp"
#include "rayflow/scenario.hpp"

namespace {

int do_run(const std::string& scenario_path, const std::string& out_dir) {
  const rayflow::Scenario sc = rayflow::load_scenario(scenario_path);
  const rayflow::RunResult result = rayflow::run_scenario(sc, out_dir);
  if (result.exit_code != 0) {
    std::cerr << "failed analyses:";
    for (const auto& name : result.failed) std::cerr << " " << name;
    std::cerr << "\n";
  }
  std::cout << "wrote " << out_dir << "/summary.json\n";
  return result.exit_code;
}

int do_check(const std::string& model_spec, const std::string& property,
             long long samples, std::uint64_t seed, double tol, int grid,
             const std::string& out_file) {
  const rayflow::ModelPtr model = rayflow::make_named_model(model_spec);
  rayflow::CheckConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.tol = tol;
  const rayflow::CheckOutcome outcome = rayflow::run_check(model, property, cfg, grid);
  std::cout << outcome.report.dump(2) << "\n";
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw rayflow::ConfigError("cannot write " + out_file);
    out << outcome.report.dump(2) << "\n";
  }
  return outcome.exit_code;
}

int do_sweep(const std::string& scenario_path, int runs, std::uint64_t seed,
             const std::string& out_dir) {
  const rayflow::Scenario sc = rayflow::load_scenario(scenario_path);
  const rayflow::SweepResult result = rayflow::run_sweep(sc, runs, seed, out_dir);
  std::cout << result.aggregate.dump(2) << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rayflow: simulate substitute-coupled density dynamics on "
               "directed multigraphs and verify positivity, box confinement "
               "and sup-norm ray attraction"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out";
  auto* run_cmd = app.add_subcommand("run", "run a scenario file");
  run_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");

  std::string model_spec, property, report_file;
  long long samples = 10000;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  int grid = 200;
  auto* check_cmd = app.add_subcommand("check", "sample a property of a model");
  check_cmd->add_option("--model", model_spec, "model spec (e.g. linear:demo, ratio:n4)")
      ->required();
  check_cmd
      ->add_option("--property", property,
                   "gs | strong-gs | class-n | homogeneity | a5 | lemma1 | equilibria-scan")
      ->required();
  check_cmd->add_option("--samples", samples, "sample count");
  check_cmd->add_option("--seed", seed, "sampler seed");
  check_cmd->add_option("--tol", tol, "tolerance for the non-strict checks");
  check_cmd->add_option("--grid", grid, "grid resolution for equilibria-scan");
  check_cmd->add_option("--out", report_file, "also write the report to this file");

  int runs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "randomized replicates of a scenario");
  sweep_cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sweep_cmd->add_option("--runs", runs, "number of runs")->required();
  sweep_cmd->add_option("--seed", seed, "sweep seed");
  sweep_cmd->add_option("--out", out_dir, "output directory");

  std::string demo_name;
  bool list_demos = false;
  auto* demo_cmd = app.add_subcommand("demo", "run a built-in demo");
  demo_cmd->add_option("name", demo_name, "demo name");
  demo_cmd->add_flag("--list", list_demos, "list demo names");
  demo_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) return do_run(scenario_path, out_dir);
    if (*check_cmd) return do_check(model_spec, property, samples, seed, tol, grid,
                                    report_file);
    if (*sweep_cmd) return do_sweep(scenario_path, runs, seed, out_dir);
    if (*demo_cmd) {
      if (list_demos) {
        for (const auto& name : rayflow::demo_names()) std::cout << name << "\n";
        return 0;
      }
      if (demo_name.empty())
        throw rayflow::ConfigError("demo name required (or --list)");
      return rayflow::run_demo(demo_name, out_dir);
    }
  } catch (const rayflow::NumericError& err) {
    std::cerr << "numeric error: " << err.what()
              << " (last good time " << err.last_good_time << ")\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
