// Acceptance suite: each case prints one [PASS]/[FAIL] line. Tolerances and
// thresholds are pinned in the assertions, not configurable.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rayflow/checkers.hpp"
#include "rayflow/generators.hpp"
#include "rayflow/models.hpp"
#include "rayflow/ray.hpp"
#include "rayflow/rng.hpp"
#include "rayflow/runner.hpp"
#include "rayflow/scenario.hpp"
#include "rayflow/sim.hpp"
#include "rayflow/trajectory_analysis.hpp"

using namespace rayflow;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, const char* label, bool pass, double seconds) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              label, seconds);
  std::fflush(stdout);
}

Matrix ones_offdiag(int m) {
  Matrix w = Matrix::zero(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) w(i, j) = 1.0;
  return w;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string strip_timestamp(std::string text) {
  const auto pos = text.find("\"generated_at\"");
  if (pos == std::string::npos) return text;
  const auto end = text.find('\n', pos);
  text.erase(pos, end - pos + 1);
  return text;
}

const Matrix kDemoA{2, {-2.0, 1.0, 1.0, -2.0}};
const std::vector<double> kDemoB{1.0, 1.0};

}  // namespace

TEST_CASE("criterion 1: positivity across random substitute-coupled systems") {
  Stopwatch watch;
  Rng rng(1);
  bool all_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const MetzlerInstance inst = random_metzler_instance(rng, 8);
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    cfg.t_end = 20.0;
    cfg.sample_every = 2000;  // monitors run per step regardless
    const Trajectory traj = integrate(*inst.model, inst.start, cfg);
    if (!monitor_positivity(traj).ok || traj.min_component < -1e-9) {
      all_ok = false;
      break;
    }
  }
  const double elapsed = watch.seconds();
  const bool pass = all_ok && elapsed < 60.0;
  report(1, "1000 random positive systems stay above -1e-9", pass, elapsed);
  CHECK(all_ok);
  CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 2: equilibrium-ray uniqueness scan") {
  Stopwatch watch;
  Rng rng(2);
  bool all_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 2;
    const Matrix w = random_irreducible_weights(rng, m, 0.5, 2.0);
    const auto model = RatioConsensusModel::constant(w);
    ScanConfig cfg;
    cfg.grid = 200;
    const ScanReport scan = scan_equilibria(*model, cfg);
    if (scan.verdict != Verdict::Pass || scan.hit_count == 0) all_ok = false;
    for (const auto& hit : scan.hits)
      if (hit.ray_distance >= scan.spacing) all_ok = false;
  }
  // reducible counterexample must be flagged as a failure
  const auto blocks = RatioConsensusModel::constant(two_block_weights(2, 3));
  ScanConfig cfg;
  cfg.grid = 200;
  const bool counterexample_fails = scan_equilibria(*blocks, cfg).verdict == Verdict::Fail;
  const double elapsed = watch.seconds();
  const bool pass = all_ok && counterexample_fails && elapsed < 120.0;
  report(2, "scan flags only ray neighborhoods; two-block case fails", pass, elapsed);
  CHECK(all_ok);
  CHECK(counterexample_fails);
  CHECK(elapsed < 120.0);
}

TEST_CASE("criterion 3: box confinement on random ratio runs") {
  Stopwatch watch;
  Rng rng(3);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RatioInstance inst = random_ratio_instance(rng, 10);
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    cfg.t_end = 50.0;
    cfg.sample_every = 1000;
    const Trajectory traj = integrate(*inst.model, inst.start, cfg);
    const BoxReport box = monitor_box(traj, *inst.model);
    if (!box.applicable || !box.ok) ++violations;
  }
  const double elapsed = watch.seconds();
  report(3, "running extrema monotone within 10*h*rate slack, 100/100", violations == 0,
         elapsed);
  CHECK(violations == 0);
}

TEST_CASE("criterion 4: attraction to the ray with bounded Lyapunov jumps") {
  Stopwatch watch;
  Rng rng(4);
  int converged = 0, jump_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RatioInstance inst = random_ratio_instance(rng, 10);
    IntegratorConfig cfg;
    cfg.step = 1e-3;
    cfg.t_end = 50.0;
    cfg.sample_every = 1000;
    const Trajectory traj = integrate(*inst.model, inst.start, cfg);
    const double final_distance = ray_distance(traj.ray_slice(traj.states.size() - 1));
    if (!traj.domain_exit_at && final_distance < 1e-6) ++converged;
    if (traj.max_lyap_jump <= 10.0 * cfg.step * traj.max_rate_sup) ++jump_ok;
  }
  const double elapsed = watch.seconds();
  const bool pass = converged == 100 && jump_ok == 100 && elapsed < 180.0;
  report(4, "100/100 random instances reach distance < 1e-6 by t=50", pass, elapsed);
  CHECK(converged == 100);
  CHECK(jump_ok == 100);
  CHECK(elapsed < 180.0);
}

TEST_CASE("criterion 5: decay inequality along the two-route ratio demo") {
  Stopwatch watch;
  const auto model = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 20.0;
  cfg.sample_every = 1;
  const Trajectory traj = integrate(*model, {3.0, 1.0}, cfg);
  const DiniReport dini = check_dini_bound(traj, *model, 1e-9, 5.0);

  // hand-computed point check at e = (2, 1): bound is -0.5
  const RayProjection proj = ray_project(DensityVector{2.0, 1.0});
  const DensityVector g = model->eval(0.0, {2.0, 1.0});
  double bound = 1e300;
  for (int i : proj.active_set)
    bound = std::min(bound, std::abs(g[static_cast<std::size_t>(i)]));
  IntegratorConfig one_step = cfg;
  one_step.t_end = cfg.step;
  const Trajectory step = integrate(*model, {2.0, 1.0}, one_step);
  const double fd =
      (ray_distance(step.ray_slice(1)) - ray_distance(step.ray_slice(0))) / cfg.step;
  const bool point_ok = bound == 0.5 && fd <= -bound + 2.0 * cfg.step;

  const double elapsed = watch.seconds();
  const bool pass = dini.applicable && dini.pass && dini.required_slack <= 5.0 && point_ok;
  report(5, "forward differences satisfy the decay bound with C <= 5", pass, elapsed);
  CHECK(dini.applicable);
  CHECK(dini.required_slack <= 5.0);
  CHECK(point_ok);
}

TEST_CASE("criterion 6: linear equilibrium by integration and independent solve") {
  Stopwatch watch;
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 20.0;
  const Trajectory traj = integrate(*model, {3.0, 1.0}, cfg);
  const double integration_error =
      std::max(std::abs(traj.states.back()[0] - 1.0),
               std::abs(traj.states.back()[1] - 1.0));

  // independent oracle: hand elimination of the 2x2 system
  const double det = kDemoA(0, 0) * kDemoA(1, 1) - kDemoA(0, 1) * kDemoA(1, 0);
  const double x = (-kDemoB[0] * kDemoA(1, 1) + kDemoB[1] * kDemoA(0, 1)) / det;
  const double y = (-kDemoB[1] * kDemoA(0, 0) + kDemoB[0] * kDemoA(1, 0)) / det;
  const LinearEquilibrium eq = linear_equilibrium(*model);
  const double solver_error =
      std::max(std::abs(eq.equilibrium[0] - x), std::abs(eq.equilibrium[1] - y));

  const double elapsed = watch.seconds();
  const bool pass = integration_error < 1e-6 && solver_error < 1e-12 && eq.hurwitz;
  report(6, "trajectory and solver agree on the equilibrium", pass, elapsed);
  CHECK(integration_error < 1e-6);
  CHECK(solver_error < 1e-12);
  CHECK(eq.hurwitz);
}

TEST_CASE("criterion 7: homogeneity and substitute checkers") {
  Stopwatch watch;
  CheckConfig cfg;
  cfg.samples = 10000;

  const auto ratio = RatioConsensusModel::constant(ones_offdiag(3));
  const CheckReport hom_ratio = check_homogeneity(*ratio, cfg);
  const bool ratio_zero_residual = hom_ratio.verdict == Verdict::Pass &&
                                   !hom_ratio.metrics.empty() &&
                                   hom_ratio.metrics.front().second == 0.0;

  const LinearModel linear(kDemoA, kDemoB);
  const CheckReport hom_linear = check_homogeneity(linear, cfg);
  // hand witness: g(2e) - g(e) = A e = (-1, -1) at e = (1, 1)
  const DensityVector base = linear.eval(0.0, {1.0, 1.0});
  const DensityVector doubled = linear.eval(0.0, {2.0, 2.0});
  const bool witness_ok = doubled[0] - base[0] == -1.0 && doubled[1] - base[1] == -1.0;

  const auto metzler = LinearModel::metzler(kDemoA, kDemoB);
  const CheckReport gs_good = check_gross_substitute(*metzler, cfg);
  const LinearModel planted(Matrix{2, {-2.0, -1.0, 1.0, -2.0}}, kDemoB);
  const CheckReport gs_bad = check_gross_substitute(planted, cfg);
  bool replayable = gs_bad.verdict == Verdict::Fail && !gs_bad.violations.empty();
  for (const auto& v : gs_bad.violations)
    replayable = replayable && replay_violation(planted, "gs", v, gs_bad.tolerance);

  const double elapsed = watch.seconds();
  const bool pass = ratio_zero_residual && hom_linear.verdict == Verdict::Fail &&
                    witness_ok && gs_good.verdict == Verdict::Pass && replayable;
  report(7, "checkers separate the field classes with replayable witnesses", pass,
         elapsed);
  CHECK(ratio_zero_residual);
  CHECK(hom_linear.verdict == Verdict::Fail);
  CHECK(witness_ok);
  CHECK(gs_good.verdict == Verdict::Pass);
  CHECK(replayable);
}

TEST_CASE("criterion 8: scaled versus difference consensus") {
  Stopwatch watch;
  const LaplacianModel laplacian(Matrix{2, {0.0, 1.0, 1.0, 0.0}});
  const auto ratio = RatioConsensusModel::constant(ones_offdiag(2));
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 20.0;
  const Trajectory lap_traj = integrate(laplacian, {1.0, 3.0}, cfg);
  const Trajectory ratio_traj = integrate(*ratio, {3.0, 1.0}, cfg);
  const ComparisonRecord record =
      compare_scaled_vs_difference(ratio_traj, lap_traj, true, 1e-6);

  const bool lap_ok =
      std::abs(lap_traj.states.back()[0] - 2.0) < 1e-6 &&
      std::abs(lap_traj.states.back()[1] - 2.0) < 1e-6 &&
      record.difference.sum_drift && *record.difference.sum_drift <= 1e-9;
  const bool ratio_ok = record.scaled.final_distance < 1e-6 &&
                        record.scaled.lambda_star_final > 1.0 &&
                        record.scaled.lambda_star_final < 3.0;
  const nlohmann::ordered_json emitted = comparison_json(record);
  const bool record_ok = emitted.contains("scaled") && emitted.contains("difference");

  const double elapsed = watch.seconds();
  const bool pass = lap_ok && ratio_ok && record_ok;
  report(8, "difference consensus keeps the average, scaled stays bracketed", pass,
         elapsed);
  CHECK(lap_ok);
  CHECK(ratio_ok);
  CHECK(record_ok);
}

TEST_CASE("criterion 9: epsilon-limit study") {
  Stopwatch watch;
  const auto model = LinearModel::metzler(kDemoA, kDemoB);
  IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.t_end = 20.0;
  const EpsilonStudy study =
      epsilon_limit_study(model, {3.0, 1.0}, {1e-2, 1e-3, 1e-4}, cfg);
  const bool strictly_decreasing =
      study.entries[0].endpoint_discrepancy > study.entries[1].endpoint_discrepancy &&
      study.entries[1].endpoint_discrepancy > study.entries[2].endpoint_discrepancy;
  const bool slope_ok = std::abs(study.loglog_slope - 1.0) <= 0.2;
  const double elapsed = watch.seconds();
  report(9, "endpoint discrepancies shrink linearly in epsilon",
         strictly_decreasing && slope_ok, elapsed);
  CHECK(strictly_decreasing);
  CHECK(slope_ok);
}

TEST_CASE("criterion 10: determinism of scenario artifacts") {
  Stopwatch watch;
  const Scenario sc = parse_scenario(demo_scenario_text("ratio-n2"), "ratio-n2");
  const fs::path dir_a = fs::temp_directory_path() / "rayflow-acc-det-a";
  const fs::path dir_b = fs::temp_directory_path() / "rayflow-acc-det-b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  run_scenario(sc, dir_a.string());
  run_scenario(sc, dir_b.string());

  bool identical = true;
  for (const char* name : {"trajectory.csv", "distance.csv"})
    identical = identical && slurp(dir_a / name) == slurp(dir_b / name);
  identical = identical && strip_timestamp(slurp(dir_a / "summary.json")) ==
                               strip_timestamp(slurp(dir_b / "summary.json"));
  for (const char* name : {"homogeneity", "strong-gs", "a5"})
    identical = identical &&
                slurp(dir_a / "checks" / (std::string(name) + ".json")) ==
                    slurp(dir_b / "checks" / (std::string(name) + ".json"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  const double elapsed = watch.seconds();
  report(10, "identical seeds give byte-identical artifacts", identical, elapsed);
  CHECK(identical);
}
