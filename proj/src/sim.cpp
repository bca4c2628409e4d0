#include "rayflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rayflow/errors.hpp"
#include "rayflow/ray.hpp"

namespace rayflow {

namespace {

constexpr double kConeFloor = 1e-12;
constexpr double kNegativeTolerance = 1e-9;

bool cone_ok(std::span<const double> e, int lo, int hi) {
  for (int i = lo; i < hi; ++i)
    if (!(e[static_cast<std::size_t>(i)] > kConeFloor)) return false;
  return true;
}

double sup_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

struct CoreResult {
  DensityVector endpoint;
  bool exited = false;
  double exit_t = 0.0;
};

// One integration pass; monitors and sampling are only attached on the
// primary pass (out != nullptr).
CoreResult run_pass(const ExcessDemandModel& model, const DensityVector& e0,
                    const IntegratorConfig& cfg, double h, Trajectory* out) {
  const int m = model.dimension();
  const auto cone = model.cone_block();
  const int cone_lo = cone.first, cone_hi = cone.second;
  const long long n_steps = std::llround((cfg.t_end - cfg.t0) / h);

  DensityVector e = e0;
  DensityVector k1(m), k2(m), k3(m), k4(m), stage(m), next(m);

  int ray_lo = cone_hi > cone_lo ? cone_lo : 0;
  int ray_hi = cone_hi > cone_lo ? cone_hi : m;
  auto ray_slice = [&](const DensityVector& s) {
    return std::span<const double>(s).subspan(static_cast<std::size_t>(ray_lo),
                                              static_cast<std::size_t>(ray_hi - ray_lo));
  };

  double lo_running_max = 0.0, hi_running_min = 0.0, d_prev = 0.0;
  if (out) {
    out->times.push_back(cfg.t0);
    out->states.push_back(e);
    out->ray_begin = ray_lo;
    out->ray_end = ray_hi;
    const auto rs = ray_slice(e);
    out->initial_max = *std::max_element(rs.begin(), rs.end());
    out->initial_min = *std::min_element(rs.begin(), rs.end());
    lo_running_max = out->initial_max;
    hi_running_min = out->initial_min;
    d_prev = ray_distance(rs);
    out->min_component = *std::min_element(e.begin(), e.end());
    if (out->min_component < -kNegativeTolerance) {
      const auto it = std::min_element(e.begin(), e.end());
      out->first_negative = MonitorEvent{cfg.t0, static_cast<int>(it - e.begin()), *it};
    }
  }

  CoreResult result;
  for (long long k = 0; k < n_steps; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * h;
    const double t_next = cfg.t0 + static_cast<double>(k + 1) * h;

    model.eval_into(t, e, k1);
    const double rate = sup_norm(k1);
    if (out) out->max_rate_sup = std::max(out->max_rate_sup, rate);

    auto advance = [&](const DensityVector& slope, double dt) -> bool {
      for (int i = 0; i < m; ++i)
        stage[static_cast<std::size_t>(i)] =
            e[static_cast<std::size_t>(i)] + dt * slope[static_cast<std::size_t>(i)];
      return cone_ok(stage, cone_lo, cone_hi);
    };

    bool ok = advance(k1, h / 2);
    if (ok) {
      model.eval_into(t + h / 2, stage, k2);
      ok = advance(k2, h / 2);
    }
    if (ok) {
      model.eval_into(t + h / 2, stage, k3);
      ok = advance(k3, h);
    }
    if (ok) {
      model.eval_into(t + h, stage, k4);
      for (int i = 0; i < m; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        next[u] = e[u] + h / 6.0 * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
      }
      for (double x : next)
        if (!std::isfinite(x)) throw NumericError("state became non-finite", t);
      ok = cone_ok(next, cone_lo, cone_hi);
    }
    if (!ok) {
      // truncate at the attempted time; retain the last good state if the
      // decimation has not already done so
      result.exited = true;
      result.exit_t = t_next;
      if (out && out->times.back() != t) {
        out->times.push_back(t);
        out->states.push_back(e);
      }
      break;
    }
    e.swap(next);

    if (out) {
      const double mc = *std::min_element(e.begin(), e.end());
      out->min_component = std::min(out->min_component, mc);
      if (!out->first_negative && mc < -kNegativeTolerance) {
        const auto it = std::min_element(e.begin(), e.end());
        out->first_negative = MonitorEvent{t_next, static_cast<int>(it - e.begin()), *it};
      }

      const auto rs = ray_slice(e);
      const double cur_max = *std::max_element(rs.begin(), rs.end());
      const double cur_min = *std::min_element(rs.begin(), rs.end());
      const double slack = 10.0 * h * rate;
      const double excursion =
          std::max(cur_max - lo_running_max, hi_running_min - cur_min);
      out->box_worst_excursion = std::max(out->box_worst_excursion, excursion);
      if (!out->box_violated && excursion > slack) {
        out->box_violated = true;
        out->first_box_event = MonitorEvent{t_next, -1, excursion};
      }
      lo_running_max = std::min(lo_running_max, cur_max);
      hi_running_min = std::max(hi_running_min, cur_min);

      const double d = ray_distance(rs);
      out->max_lyap_jump = std::max(out->max_lyap_jump, d - d_prev);
      d_prev = d;

      if ((k + 1) % cfg.sample_every == 0 || k + 1 == n_steps) {
        out->times.push_back(t_next);
        out->states.push_back(e);
      }
    }
  }
  result.endpoint = std::move(e);
  return result;
}

}  // namespace

Trajectory integrate(const ExcessDemandModel& model, const DensityVector& e0,
                     const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0)) throw ConfigError("step must be positive");
  if (!(cfg.t_end > cfg.t0)) throw ConfigError("t_end must exceed t0");
  if (cfg.sample_every < 1) throw ConfigError("sample_every must be at least 1");
  if (static_cast<int>(e0.size()) != model.dimension())
    throw StructuralError("initial state has " + std::to_string(e0.size()) +
                          " components, model expects " + std::to_string(model.dimension()));
  const auto [cone_lo, cone_hi] = model.cone_block();
  for (int i = cone_lo; i < cone_hi; ++i)
    if (!(e0[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("initial state must be strictly positive in guarded components");
  if (model.domain() == Domain::Orthant && !in_orthant(e0))
    throw DomainError("initial state must lie in the nonnegative orthant");

  Trajectory traj;
  traj.model_id = model.id();
  traj.config = cfg;
  const CoreResult primary = run_pass(model, e0, cfg, cfg.step, &traj);
  if (primary.exited) traj.domain_exit_at = primary.exit_t;

  if (cfg.refine && !primary.exited) {
    const CoreResult fine = run_pass(model, e0, cfg, cfg.step / 2.0, nullptr);
    if (!fine.exited) {
      double d = 0.0;
      for (std::size_t i = 0; i < fine.endpoint.size(); ++i)
        d = std::max(d, std::abs(fine.endpoint[i] - primary.endpoint[i]));
      traj.refinement_discrepancy = d;
    }
  }
  return traj;
}

PositivityReport monitor_positivity(const Trajectory& traj) {
  PositivityReport report;
  if (traj.first_negative) {
    report.ok = false;
    report.first_violation = traj.first_negative;
    return report;
  }
  if (traj.domain_exit_at) {
    report.ok = false;
    report.first_violation = MonitorEvent{*traj.domain_exit_at, -1, 0.0};
    return report;
  }
  report.ok = true;
  return report;
}

BoxReport monitor_box(const Trajectory& traj, const ExcessDemandModel& model) {
  BoxReport report;
  report.applicable = model.claimed_classes().has(ModelClass::RayContracting);
  if (!report.applicable) return report;
  report.ok = !traj.box_violated && !traj.domain_exit_at;
  report.first_violation = traj.first_box_event;
  report.worst_excursion = traj.box_worst_excursion;
  return report;
}

EpsilonStudy epsilon_limit_study(const ModelPtr& model, const DensityVector& e0,
                                 const std::vector<double>& eps_list,
                                 const IntegratorConfig& cfg) {
  if (!model->claimed_classes().has(ModelClass::BoundaryNonnegative))
    throw ConfigError("epsilon study requires the boundary-nonnegative claim");
  const Trajectory base = integrate(*model, e0, cfg);
  const DensityVector& base_end = base.states.back();

  EpsilonStudy study;
  for (double eps : eps_list) {
    if (eps < 0.0) throw DomainError("epsilon entries must be nonnegative");
    EpsilonStudyEntry entry{eps, 0.0};
    if (eps == 0.0) {
      entry.endpoint_discrepancy = 0.0;
    } else {
      const ModelPtr shifted = add_epsilon(model, eps);
      const Trajectory t = integrate(*shifted, e0, cfg);
      double d = 0.0;
      for (std::size_t i = 0; i < base_end.size(); ++i)
        d = std::max(d, std::abs(t.states.back()[i] - base_end[i]));
      entry.endpoint_discrepancy = d;
    }
    study.entries.push_back(entry);
  }

  study.decreasing = true;
  for (std::size_t i = 1; i < study.entries.size(); ++i) {
    if (study.entries[i].eps == 0.0 || study.entries[i - 1].eps == 0.0) continue;
    if (study.entries[i].endpoint_discrepancy >
        1.1 * study.entries[i - 1].endpoint_discrepancy)
      study.decreasing = false;
  }

  // log-log slope over the positive entries
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& entry : study.entries) {
    if (entry.eps <= 0.0 || entry.endpoint_discrepancy <= 0.0) continue;
    const double x = std::log(entry.eps), y = std::log(entry.endpoint_discrepancy);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  study.loglog_slope =
      n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return study;
}

}  // namespace rayflow
