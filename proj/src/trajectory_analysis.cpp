#include "rayflow/trajectory_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rayflow/errors.hpp"

namespace rayflow {

LyapunovSeries lyapunov_series(const Trajectory& traj) {
  LyapunovSeries series;
  series.times = traj.times;
  series.values.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    series.values.push_back(ray_distance(traj.ray_slice(k)));
  double jump = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < series.values.size(); ++k)
    jump = std::max(jump, series.values[k] - series.values[k - 1]);
  series.max_upward_jump = series.values.size() > 1 ? jump : 0.0;
  return series;
}

DiniReport check_dini_bound(const Trajectory& traj, const ExcessDemandModel& model,
                            double tie_tol, double c_max) {
  DiniReport report;
  report.c_max = c_max;
  const ClassSet classes = model.claimed_classes();
  if (!classes.has(ModelClass::RayContracting) ||
      !classes.has(ModelClass::ScaleInvariant) ||
      !classes.has(ModelClass::StrongGrossSubstitute)) {
    report.reason = "model does not claim ray contraction, scale invariance "
                    "and strong substitute coupling";
    return report;
  }
  if (traj.config.sample_every != 1) {
    report.reason = "requires a full-resolution trajectory (sample_every = 1)";
    return report;
  }
  if (traj.states.size() < 2) {
    report.reason = "trajectory too short";
    return report;
  }

  report.applicable = true;
  const double h = traj.config.step;
  double worst_margin = -std::numeric_limits<double>::infinity();
  DensityVector g(static_cast<std::size_t>(model.dimension()));
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const auto slice = traj.ray_slice(k);
    const RayProjection proj = ray_project(slice, tie_tol);
    model.eval_into(traj.times[k], traj.states[k], g);
    double bound = std::numeric_limits<double>::infinity();
    for (int i : proj.active_set)
      bound = std::min(bound, std::abs(g[static_cast<std::size_t>(traj.ray_begin + i)]));
    const double rho_k = proj.distance;
    const double rho_next = ray_distance(traj.ray_slice(k + 1));
    const double fd = (rho_next - rho_k) / h;
    worst_margin = std::max(worst_margin, fd + bound);
    ++report.steps;
  }
  report.worst_margin = worst_margin;
  report.required_slack = std::max(0.0, worst_margin / h);
  report.pass = report.required_slack <= c_max;
  return report;
}

std::optional<double> detect_consensus(const Trajectory& traj, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("consensus epsilon must be positive");
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    if (ray_distance(traj.ray_slice(k)) < epsilon) return traj.times[k];
  return std::nullopt;
}

namespace {

ConsensusSummary summarize(const Trajectory& traj, double epsilon, bool track_sum) {
  ConsensusSummary s;
  s.consensus_time = detect_consensus(traj, epsilon);
  const auto last = traj.ray_slice(traj.states.size() - 1);
  const RayProjection proj = ray_project(last);
  s.lambda_star_final = proj.lambda_star;
  s.final_distance = proj.distance;
  s.preserved_invariant = track_sum ? "sum" : "none";
  if (track_sum) {
    const auto first = traj.ray_slice(0);
    const double sum0 = std::accumulate(first.begin(), first.end(), 0.0);
    double drift = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      const auto slice = traj.ray_slice(k);
      drift = std::max(drift,
                       std::abs(std::accumulate(slice.begin(), slice.end(), 0.0) - sum0));
    }
    s.sum_drift = drift;
  }
  return s;
}

}  // namespace

ComparisonRecord compare_scaled_vs_difference(const Trajectory& ratio_traj,
                                              const Trajectory& laplacian_traj,
                                              bool laplacian_symmetric,
                                              double epsilon) {
  ComparisonRecord record;
  record.epsilon = epsilon;
  record.scaled = summarize(ratio_traj, epsilon, false);
  record.difference = summarize(laplacian_traj, epsilon, laplacian_symmetric);
  return record;
}

}  // namespace rayflow
