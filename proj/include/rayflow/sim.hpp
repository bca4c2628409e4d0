#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rayflow/models.hpp"

namespace rayflow {

struct IntegratorConfig {
  double step = 1e-3;
  double t0 = 0.0;
  double t_end = 10.0;
  int sample_every = 10;  // output decimation; monitors always run per step
  bool refine = false;    // second pass at step/2, endpoint discrepancy recorded
};

struct MonitorEvent {
  double t = 0.0;
  int component = -1;
  double value = 0.0;
};

/// Sampled solution of e' = g(t, e) plus the per-step monitor data the
/// decimated output would otherwise lose. ray_begin/ray_end mark the slice
/// the ray analyses apply to (the guarded edge block for composite systems,
/// the whole state otherwise).
struct Trajectory {
  std::vector<double> times;           // strictly increasing, times[0] = t0
  std::vector<DensityVector> states;   // retained samples
  std::string model_id;
  IntegratorConfig config;
  int ray_begin = 0;
  int ray_end = 0;

  std::optional<double> domain_exit_at;
  std::optional<double> refinement_discrepancy;

  // full step resolution; the excursion and jump trackers are clamped at
  // zero so step-free trajectories read as vacuously clean
  double min_component = std::numeric_limits<double>::infinity();
  std::optional<MonitorEvent> first_negative;  // component below -1e-9
  bool box_violated = false;
  std::optional<MonitorEvent> first_box_event;
  double box_worst_excursion = 0.0;
  double max_rate_sup = 0.0;   // max over steps of ||g||_sup at step start
  double max_lyap_jump = 0.0;
  double initial_max = 0.0;    // over the ray slice
  double initial_min = 0.0;

  std::span<const double> ray_slice(std::size_t k) const {
    return std::span<const double>(states[k]).subspan(
        static_cast<std::size_t>(ray_begin),
        static_cast<std::size_t>(ray_end - ray_begin));
  }
};

/// Classical 4-stage fixed-step integration. Deterministic: a pure function
/// of (model, e0, cfg). Open-cone states are truncated with domain_exit_at
/// when any guarded component falls under 1e-12 (the field is near-singular
/// there and the excursion is the finding, not something to clamp).
Trajectory integrate(const ExcessDemandModel& model, const DensityVector& e0,
                     const IntegratorConfig& cfg);

struct PositivityReport {
  bool ok = false;
  std::optional<MonitorEvent> first_violation;
};

/// Orthant states must stay above -1e-9 at every step; guarded cone
/// components must stay strictly positive (a domain exit counts against).
PositivityReport monitor_positivity(const Trajectory& traj);

struct BoxReport {
  bool applicable = false;  // requires the ray-contraction claim
  bool ok = false;
  std::optional<MonitorEvent> first_violation;
  double worst_excursion = 0.0;  // running-extrema excess, before slack
};

/// Running max nonincreasing and running min nondecreasing over the ray
/// slice, within a per-step slack of 10 * h * (local rate bound).
BoxReport monitor_box(const Trajectory& traj, const ExcessDemandModel& model);

struct EpsilonStudyEntry {
  double eps = 0.0;
  double endpoint_discrepancy = 0.0;  // sup distance to the eps = 0 endpoint
};

struct EpsilonStudy {
  std::vector<EpsilonStudyEntry> entries;
  bool decreasing = false;   // discrepancies follow decreasing eps within 10%
  double loglog_slope = 0.0; // least-squares slope of log d against log eps
};

/// Integrates the model and its eps-shifted variants from the same start
/// and compares endpoints. Requires the boundary-nonnegative claim.
EpsilonStudy epsilon_limit_study(const ModelPtr& model, const DensityVector& e0,
                                 const std::vector<double>& eps_list,
                                 const IntegratorConfig& cfg);

}  // namespace rayflow
