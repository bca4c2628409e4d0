#include "rayflow/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "rayflow/errors.hpp"
#include "rayflow/ray.hpp"
#include "rayflow/rng.hpp"
#include "rayflow/svg.hpp"

namespace rayflow {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json vector_json(const DensityVector& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

CheckReport dispatch_check(const ModelPtr& model, const std::string& property,
                           const CheckConfig& cfg) {
  if (property == "gs") return check_gross_substitute(*model, cfg);
  if (property == "strong-gs") return check_strong_gross_substitute(*model, cfg);
  if (property == "class-n") return check_boundary_nonnegative(*model, cfg);
  if (property == "homogeneity") return check_homogeneity(*model, cfg);
  if (property == "a5") return check_ray_contraction(*model, cfg);
  if (property == "lemma1") return check_pairwise_crossing(*model, cfg);
  throw ConfigError("unknown check property '" + property + "'");
}

}  // namespace

ordered_json check_report_json(const CheckReport& report) {
  ordered_json j;
  j["property"] = report.property;
  j["model"] = report.model_id;
  j["verdict"] = verdict_token(report.verdict);
  j["samples"] = report.samples;
  j["evaluated"] = report.evaluated;
  j["skipped"] = report.skipped;
  j["seed"] = report.seed;
  j["tolerance"] = report.tolerance;
  j["violation_count"] = report.violation_count;
  ordered_json violations = ordered_json::array();
  for (const auto& v : report.violations) {
    ordered_json jv;
    jv["sample"] = v.sample;
    jv["t"] = v.t;
    ordered_json vectors;
    for (const auto& [name, vec] : v.vectors) vectors[name] = vector_json(vec);
    jv["vectors"] = vectors;
    ordered_json values;
    for (const auto& [name, x] : v.values) values[name] = x;
    jv["values"] = values;
    jv["note"] = v.note;
    violations.push_back(jv);
  }
  j["violations"] = violations;
  if (!report.metrics.empty()) {
    ordered_json metrics;
    for (const auto& [name, x] : report.metrics) metrics[name] = x;
    j["metrics"] = metrics;
  }
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

ordered_json scan_report_json(const ScanReport& report) {
  ordered_json j;
  j["property"] = "equilibria-scan";
  j["model"] = report.model_id;
  j["verdict"] = verdict_token(report.verdict);
  j["grid"] = report.grid;
  j["spacing"] = report.spacing;
  j["points_scanned"] = report.points_scanned;
  j["hit_count"] = report.hit_count;
  ordered_json hits = ordered_json::array();
  for (const auto& h : report.hits) {
    ordered_json jh;
    jh["point"] = vector_json(h.point);
    jh["residual"] = h.residual;
    jh["ray_distance"] = h.ray_distance;
    hits.push_back(jh);
  }
  j["hits"] = hits;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

ordered_json comparison_json(const ComparisonRecord& record) {
  auto side = [](const ConsensusSummary& s) {
    ordered_json j;
    if (s.consensus_time) j["consensus_time"] = *s.consensus_time;
    else j["consensus_time"] = nullptr;
    j["lambda_star_final"] = s.lambda_star_final;
    j["final_distance"] = s.final_distance;
    j["preserved_invariant"] = s.preserved_invariant;
    if (s.sum_drift) j["sum_drift"] = *s.sum_drift;
    return j;
  };
  ordered_json j;
  j["epsilon"] = record.epsilon;
  j["scaled"] = side(record.scaled);
  j["difference"] = side(record.difference);
  return j;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          int vertex_block) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t";
  for (int i = 0; i < vertex_block; ++i) out << ",v_" << (i + 1);
  for (int i = 0; i < dim - vertex_block; ++i) out << ",e_" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << num(traj.times[k]);
    for (double x : traj.states[k]) out << "," << num(x);
    out << "\n";
  }
}

void write_distance_csv(const std::string& path, const LyapunovSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "t,V\n";
  for (std::size_t k = 0; k < series.values.size(); ++k)
    out << num(series.times[k]) << "," << num(series.values[k]) << "\n";
}

namespace {

void write_plots(const std::string& out_dir, const Scenario& sc,
                 const Trajectory& traj, const LyapunovSeries& series) {
  std::vector<PlotSeries> components;
  const int dim = static_cast<int>(traj.states.front().size());
  for (int i = 0; i < dim; ++i) {
    PlotSeries s;
    s.label = i < sc.vertex_block ? "v_" + std::to_string(i + 1)
                                  : "e_" + std::to_string(i + 1 - sc.vertex_block);
    s.x = traj.times;
    s.y.reserve(traj.states.size());
    for (const auto& state : traj.states)
      s.y.push_back(state[static_cast<std::size_t>(i)]);
    components.push_back(std::move(s));
  }
  write_line_plot(out_dir + "/trajectory.svg", sc.name + ": state components",
                  "t", "density", components);
  write_line_plot(out_dir + "/distance.svg", sc.name + ": sup-norm ray distance",
                  "t", "V(t)", {{"V", series.times, series.values}});
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const std::string& out_dir) {
  RunResult result;
  const bool write_artifacts = !out_dir.empty();
  if (write_artifacts) fs::create_directories(out_dir);

  result.trajectory = std::make_shared<Trajectory>(
      integrate(*sc.model, sc.initial, sc.integrator));
  const Trajectory& traj = *result.trajectory;
  const LyapunovSeries series = lyapunov_series(traj);

  ordered_json& summary = result.summary;
  summary["scenario"] = sc.name;
  summary["model"] = {{"kind", sc.model_kind},
                      {"id", sc.model->id()},
                      {"claims", sc.model->claimed_classes().tokens()}};
  summary["integrator"] = {{"h", sc.integrator.step},
                           {"t0", sc.integrator.t0},
                           {"t_end", sc.integrator.t_end},
                           {"sample_every", sc.integrator.sample_every},
                           {"refine", sc.integrator.refine}};
  summary["endpoint"] = {{"t", traj.times.back()},
                         {"state", vector_json(traj.states.back())}};

  const RayProjection final_proj = ray_project(traj.ray_slice(traj.states.size() - 1));
  summary["lambda_star_final"] = final_proj.lambda_star;
  summary["final_ray_distance"] = final_proj.distance;
  if (sc.vertex_block > 0) {
    const auto& last = traj.states.back();
    const auto [lo, hi] = std::minmax_element(
        last.begin(), last.begin() + sc.vertex_block);
    summary["vertex_spread_final"] = *hi - *lo;
  }

  const PositivityReport positivity = monitor_positivity(traj);
  const BoxReport box = monitor_box(traj, *sc.model);
  summary["monitor_flags"] = {
      {"positivity_ok", positivity.ok},
      {"box_ok", box.applicable ? ordered_json(box.ok) : ordered_json(nullptr)},
      {"domain_exit_at", traj.domain_exit_at ? ordered_json(*traj.domain_exit_at)
                                             : ordered_json(nullptr)}};
  summary["refinement_discrepancy"] =
      traj.refinement_discrepancy ? ordered_json(*traj.refinement_discrepancy)
                                  : ordered_json(nullptr);

  ordered_json analyses;
  auto record_analysis = [&](const std::string& name, bool pass, ordered_json detail) {
    detail["pass"] = pass;
    analyses[name] = detail;
    if (!pass) result.failed.push_back(name);
  };

  if (sc.analyses.positivity) {
    ordered_json d;
    d["min_component"] = traj.min_component;
    if (positivity.first_violation)
      d["first_violation"] = {{"t", positivity.first_violation->t},
                              {"component", positivity.first_violation->component},
                              {"value", positivity.first_violation->value}};
    record_analysis("positivity", positivity.ok, std::move(d));
  }
  if (sc.analyses.box) {
    ordered_json d;
    d["worst_excursion"] = box.worst_excursion;
    d["slack_rule"] = "10*h*local_rate";
    record_analysis("box", box.applicable && box.ok, std::move(d));
  }
  if (sc.analyses.lyapunov) {
    const bool asserted = sc.model->claimed_classes().has(ModelClass::RayContracting);
    const double bound = 10.0 * sc.integrator.step * traj.max_rate_sup;
    ordered_json d;
    d["max_upward_jump"] = traj.max_lyap_jump;
    d["jump_bound"] = bound;
    d["asserted"] = asserted;
    record_analysis("lyapunov", !asserted || traj.max_lyap_jump <= bound,
                    std::move(d));
  }
  if (sc.analyses.dini_c_max) {
    // The bound check reads consecutive full-resolution steps; rerun
    // undecimated rather than trusting the retained samples.
    IntegratorConfig full = sc.integrator;
    full.sample_every = 1;
    full.refine = false;
    const Trajectory fine = integrate(*sc.model, sc.initial, full);
    const DiniReport dini = check_dini_bound(fine, *sc.model, 1e-9,
                                             *sc.analyses.dini_c_max);
    ordered_json d;
    d["applicable"] = dini.applicable;
    d["worst_margin"] = dini.worst_margin;
    d["required_slack"] = dini.required_slack;
    d["c_max"] = dini.c_max;
    d["steps"] = dini.steps;
    if (!dini.reason.empty()) d["reason"] = dini.reason;
    record_analysis("dini", dini.applicable && dini.pass, std::move(d));
    summary["dini_worst_margin"] = dini.worst_margin;
  }
  if (sc.analyses.consensus_epsilon) {
    const auto hit = detect_consensus(traj, *sc.analyses.consensus_epsilon);
    ordered_json d;
    d["epsilon"] = *sc.analyses.consensus_epsilon;
    d["time"] = hit ? ordered_json(*hit) : ordered_json(nullptr);
    record_analysis("consensus", hit.has_value(), std::move(d));
    summary["consensus_time"] = hit ? ordered_json(*hit) : ordered_json(nullptr);
  }
  if (sc.analyses.checks) {
    const ChecksRequest& req = *sc.analyses.checks;
    CheckConfig cfg;
    cfg.samples = req.samples;
    cfg.seed = req.seed;
    cfg.tol = req.tol;
    ordered_json all;
    bool ok = true;
    if (write_artifacts) fs::create_directories(out_dir + "/checks");
    for (const auto& property : req.properties) {
      ordered_json report_json;
      Verdict verdict;
      if (property == "equilibria-scan") {
        const ScanReport report = scan_equilibria(*sc.model, ScanConfig{});
        verdict = report.verdict;
        report_json = scan_report_json(report);
      } else {
        const CheckReport report = dispatch_check(sc.model, property, cfg);
        verdict = report.verdict;
        report_json = check_report_json(report);
      }
      all[property] = verdict_token(verdict);
      if (verdict == Verdict::Fail) ok = false;
      if (write_artifacts)
        write_text(out_dir + "/checks/" + property + ".json",
                   report_json.dump(2) + "\n");
    }
    record_analysis("checks", ok, ordered_json{{"verdicts", all}});
  }
  summary["analyses"] = analyses;
  summary["generated_at"] = timestamp_utc();

  if (write_artifacts) {
    write_trajectory_csv(out_dir + "/trajectory.csv", traj, sc.vertex_block);
    write_distance_csv(out_dir + "/distance.csv", series);
    write_plots(out_dir, sc, traj, series);
    write_text(out_dir + "/summary.json", summary.dump(2) + "\n");
  }
  result.exit_code = result.failed.empty() ? 0 : 1;
  return result;
}

CheckOutcome run_check(const ModelPtr& model, const std::string& property,
                       const CheckConfig& cfg, int grid) {
  CheckOutcome outcome;
  Verdict verdict;
  if (property == "equilibria-scan") {
    ScanConfig scan_cfg;
    scan_cfg.grid = grid;
    const ScanReport report = scan_equilibria(*model, scan_cfg);
    verdict = report.verdict;
    outcome.report = scan_report_json(report);
  } else {
    const CheckReport report = dispatch_check(model, property, cfg);
    verdict = report.verdict;
    outcome.report = check_report_json(report);
  }
  outcome.exit_code = verdict == Verdict::Fail ? 1 : 0;
  return outcome;
}

SweepResult run_sweep(const Scenario& sc, int n_runs, std::uint64_t seed,
                      const std::string& out_dir) {
  if (n_runs < 0) throw ConfigError("run count must be nonnegative");
  if (n_runs > 0 && !sc.randomize.enabled)
    throw ConfigError("scenario is not marked randomizable; add a randomize section");
  if (!out_dir.empty()) fs::create_directories(out_dir);

  struct RunRow {
    bool error = false;
    std::string error_what;
    bool passed = false;
    bool positivity_ok = false;
    bool box_ok = true;
    double final_distance = 0.0;
    std::optional<double> consensus_time;
  };
  std::vector<RunRow> rows(static_cast<std::size_t>(n_runs));

  auto one_run = [&sc, seed](int run_index) -> RunRow {
    RunRow row;
    try {
      Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(run_index + 1));
      Scenario local = sc;
      for (auto& x : local.initial) x = rng.log_uniform(sc.randomize.lo, sc.randomize.hi);
      const RunResult r = run_scenario(local, "");
      row.passed = r.exit_code == 0;
      const Trajectory& traj = *r.trajectory;
      row.positivity_ok = monitor_positivity(traj).ok;
      const BoxReport box = monitor_box(traj, *local.model);
      row.box_ok = !box.applicable || box.ok;
      row.final_distance = ray_distance(traj.ray_slice(traj.states.size() - 1));
      if (local.analyses.consensus_epsilon)
        row.consensus_time = detect_consensus(traj, *local.analyses.consensus_epsilon);
    } catch (const std::exception& err) {
      row.error = true;
      row.error_what = err.what();
    }
    return row;
  };

  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (int base = 0; base < n_runs; base += static_cast<int>(workers)) {
    std::vector<std::future<RunRow>> batch;
    const int end = std::min(n_runs, base + static_cast<int>(workers));
    for (int r = base; r < end; ++r)
      batch.push_back(std::async(std::launch::async, one_run, r));
    for (int r = base; r < end; ++r)
      rows[static_cast<std::size_t>(r)] = batch[static_cast<std::size_t>(r - base)].get();
  }

  long long passed = 0, errors = 0, positivity_ok = 0, box_ok = 0;
  double max_final_distance = 0.0;
  std::vector<double> consensus_times;
  for (const auto& row : rows) {
    if (row.error) {
      ++errors;
      continue;
    }
    passed += row.passed;
    positivity_ok += row.positivity_ok;
    box_ok += row.box_ok;
    max_final_distance = std::max(max_final_distance, row.final_distance);
    if (row.consensus_time) consensus_times.push_back(*row.consensus_time);
  }
  std::sort(consensus_times.begin(), consensus_times.end());

  SweepResult result;
  ordered_json& agg = result.aggregate;
  agg["scenario"] = sc.name;
  agg["runs"] = n_runs;
  agg["seed"] = seed;
  agg["passed"] = passed;
  agg["errors"] = errors;
  agg["positivity_ok"] = positivity_ok;
  agg["box_ok"] = box_ok;
  agg["max_final_ray_distance"] = max_final_distance;
  if (!consensus_times.empty()) {
    agg["consensus_time"] = {
        {"min", consensus_times.front()},
        {"median", consensus_times[consensus_times.size() / 2]},
        {"max", consensus_times.back()},
        {"count", consensus_times.size()}};
  }
  agg["generated_at"] = timestamp_utc();
  if (!out_dir.empty())
    write_text(out_dir + "/aggregate.json", agg.dump(2) + "\n");
  result.exit_code = (errors == 0 && passed == n_runs - errors) ? 0 : 1;
  return result;
}

namespace {

Scenario comparison_laplacian_scenario() {
  Scenario sc;
  sc.name = "laplacian-vs-ratio:difference";
  sc.model_kind = "laplacian";
  auto lap = std::make_shared<LaplacianModel>(Matrix{2, {0.0, 1.0, 1.0, 0.0}},
                                              sc.name);
  sc.laplacian_symmetric = lap->symmetric();
  sc.model = lap;
  sc.initial = {3.0, 1.0};
  sc.integrator.t_end = 20.0;
  sc.analyses.lyapunov = true;
  sc.analyses.consensus_epsilon = 1e-6;
  return sc;
}

Scenario comparison_ratio_scenario() {
  Scenario sc;
  sc.name = "laplacian-vs-ratio:scaled";
  sc.model_kind = "ratio";
  sc.model = RatioConsensusModel::constant(Matrix{2, {0.0, 1.0, 1.0, 0.0}}, sc.name);
  sc.initial = {3.0, 1.0};
  sc.integrator.t_end = 20.0;
  sc.analyses.box = true;
  sc.analyses.lyapunov = true;
  sc.analyses.consensus_epsilon = 1e-6;
  return sc;
}

}  // namespace

int run_demo(const std::string& name, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (name == "laplacian-vs-ratio") {
    const Scenario lap = comparison_laplacian_scenario();
    const Scenario ratio = comparison_ratio_scenario();
    const RunResult lap_run = run_scenario(lap, out_dir + "/difference");
    const RunResult ratio_run = run_scenario(ratio, out_dir + "/scaled");
    const ComparisonRecord record = compare_scaled_vs_difference(
        *ratio_run.trajectory, *lap_run.trajectory, lap.laplacian_symmetric, 1e-6);
    write_text(out_dir + "/comparison.json", comparison_json(record).dump(2) + "\n");
    return std::max(lap_run.exit_code, ratio_run.exit_code);
  }
  const std::string text = demo_scenario_text(name);
  write_text(out_dir + "/scenario.json", text);
  const Scenario sc = parse_scenario(text, name);
  return run_scenario(sc, out_dir).exit_code;
}

}  // namespace rayflow
