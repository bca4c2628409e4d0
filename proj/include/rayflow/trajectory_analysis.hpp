#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rayflow/ray.hpp"
#include "rayflow/sim.hpp"

namespace rayflow {

/// Ray distance at every retained sample, plus the largest upward step of
/// the series. Monotone decay is a theorem consequence only under the
/// contraction claims; callers gate on those before asserting it.
struct LyapunovSeries {
  std::vector<double> times;
  std::vector<double> values;
  double max_upward_jump = 0.0;
};

LyapunovSeries lyapunov_series(const Trajectory& traj);

/// Per-step check of the decay inequality: the forward difference of the
/// ray distance must not exceed -min |g_i| over the projection's active
/// set, up to a slack of C * h. The smallest C that would pass every step
/// is recorded; callers pin the acceptable ceiling.
struct DiniReport {
  bool applicable = false;
  std::string reason;
  int steps = 0;
  double worst_margin = 0.0;   // max over steps of fd + min|g_i|; <= 0 is ideal
  double required_slack = 0.0; // minimal admissible C, clamped at 0
  double c_max = 5.0;
  bool pass = false;
};

DiniReport check_dini_bound(const Trajectory& traj, const ExcessDemandModel& model,
                            double tie_tol = 1e-9, double c_max = 5.0);

/// Earliest retained sample time with ray distance below epsilon.
std::optional<double> detect_consensus(const Trajectory& traj, double epsilon);

struct ConsensusSummary {
  std::optional<double> consensus_time;  // at the comparison epsilon
  double lambda_star_final = 0.0;
  double final_distance = 0.0;
  std::string preserved_invariant;       // "sum" or "none"
  std::optional<double> sum_drift;       // when the invariant is "sum"
};

struct ComparisonRecord {
  ConsensusSummary scaled;      // ratio-coupled run
  ConsensusSummary difference;  // Laplacian run
  double epsilon = 1e-6;
};

/// Side-by-side record of scaled (ratio) versus difference (Laplacian)
/// consensus. Sum conservation is asserted only for symmetric difference
/// coupling; the scaled run's limit is recorded as observed.
ComparisonRecord compare_scaled_vs_difference(const Trajectory& ratio_traj,
                                              const Trajectory& laplacian_traj,
                                              bool laplacian_symmetric,
                                              double epsilon = 1e-6);

}  // namespace rayflow
