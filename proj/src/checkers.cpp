#include "rayflow/checkers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rayflow/errors.hpp"
#include "rayflow/ray.hpp"
#include "rayflow/rng.hpp"

namespace rayflow {

namespace {

constexpr double kConeLo = 1e-3;
constexpr double kConeHi = 1e3;
constexpr double kProportionalTol = 1e-9;
const double kHomogeneityLambdas[] = {0.5, 2.0, 10.0};

DensityVector cone_point(Rng& rng, int m) { return rng.log_vector(m, kConeLo, kConeHi); }

DensityVector dyadic_cone_point(Rng& rng, int m) {
  DensityVector e(static_cast<std::size_t>(m));
  for (auto& x : e) x = rng.log_uniform_dyadic(kConeLo, kConeHi);
  return e;
}

void record(CheckReport& report, const CheckConfig& cfg, Violation v) {
  ++report.violation_count;
  if (static_cast<int>(report.violations.size()) < cfg.max_recorded)
    report.violations.push_back(std::move(v));
}

CheckReport make_report(const char* property, const ExcessDemandModel& model,
                        const CheckConfig& cfg) {
  CheckReport report;
  report.property = property;
  report.model_id = model.id();
  report.seed = cfg.seed;
  report.tolerance = cfg.tol;
  return report;
}

void finalize(CheckReport& report) {
  report.verdict = report.violation_count == 0 ? Verdict::Pass : Verdict::Fail;
}

}  // namespace

std::string verdict_token(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

CheckReport check_gross_substitute(const ExcessDemandModel& model,
                                   const CheckConfig& cfg) {
  CheckReport report = make_report("gs", model, cfg);
  Rng rng(cfg.seed);
  const int m = model.dimension();
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const int pivot = rng.uniform_int(0, m - 1);
    DensityVector hi = cone_point(rng, m);
    DensityVector lo = hi;
    for (int j = 0; j < m; ++j)
      if (j != pivot) lo[static_cast<std::size_t>(j)] *= 0.05 + 0.95 * rng.uniform01();
    ++report.evaluated;
    const double g_lo = model.eval(t, lo)[static_cast<std::size_t>(pivot)];
    const double g_hi = model.eval(t, hi)[static_cast<std::size_t>(pivot)];
    const double slack = cfg.tol * std::max({1.0, std::abs(g_lo), std::abs(g_hi)});
    if (g_lo > g_hi + slack) {
      Violation v{s, t, {{"e_lo", lo}, {"e_hi", hi}},
                  {{"pivot", pivot}, {"g_lo", g_lo}, {"g_hi", g_hi}},
                  "pivot rate decreased when other components rose"};
      record(report, cfg, std::move(v));
    }
  }
  finalize(report);
  return report;
}

CheckReport check_strong_gross_substitute(const ExcessDemandModel& model,
                                          const CheckConfig& cfg) {
  CheckReport report = make_report("strong-gs", model, cfg);
  const int m = model.dimension();
  if (m < 2) {
    report.verdict = Verdict::NotApplicable;
    report.note = "needs at least two components";
    return report;
  }
  Rng rng(cfg.seed);
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const int pivot = rng.uniform_int(0, m - 1);
    DensityVector hi = cone_point(rng, m);
    DensityVector lo = hi;
    for (int j = 0; j < m; ++j)
      if (j != pivot) lo[static_cast<std::size_t>(j)] *= rng.uniform(0.1, 0.9);
    ++report.evaluated;
    const double g_lo = model.eval(t, lo)[static_cast<std::size_t>(pivot)];
    const double g_hi = model.eval(t, hi)[static_cast<std::size_t>(pivot)];
    if (!(g_lo < g_hi)) {  // equality is a violation: no slack on the strict side
      Violation v{s, t, {{"e_lo", lo}, {"e_hi", hi}},
                  {{"pivot", pivot}, {"g_lo", g_lo}, {"g_hi", g_hi}},
                  "pivot rate failed to strictly increase"};
      record(report, cfg, std::move(v));
    }
  }
  finalize(report);
  return report;
}

CheckReport check_boundary_nonnegative(const ExcessDemandModel& model,
                                       const CheckConfig& cfg) {
  CheckReport report = make_report("class-n", model, cfg);
  if (model.domain() == Domain::OpenCone) {
    report.verdict = Verdict::NotApplicable;
    report.note = "open-cone model is undefined on the boundary";
    return report;
  }
  Rng rng(cfg.seed);
  const int m = model.dimension();
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const int face = rng.uniform_int(0, m - 1);
    DensityVector e = cone_point(rng, m);
    e[static_cast<std::size_t>(face)] = 0.0;
    for (int j = 0; j < m; ++j)
      if (j != face && rng.uniform01() < 0.1) e[static_cast<std::size_t>(j)] = 0.0;
    ++report.evaluated;
    const double rate = model.eval(t, e)[static_cast<std::size_t>(face)];
    if (rate < -cfg.tol * std::max(1.0, std::abs(rate))) {
      Violation v{s, t, {{"e", e}}, {{"face", face}, {"rate", rate}},
                  "inward rate negative on a boundary face"};
      record(report, cfg, std::move(v));
    }
  }
  finalize(report);
  return report;
}

CheckReport check_homogeneity(const ExcessDemandModel& model, const CheckConfig& cfg) {
  CheckReport report = make_report("homogeneity", model, cfg);
  Rng rng(cfg.seed);
  const int m = model.dimension();
  double max_residual = 0.0;
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const DensityVector e = dyadic_cone_point(rng, m);
    const DensityVector base = model.eval(t, e);
    ++report.evaluated;
    for (double lambda : kHomogeneityLambdas) {
      DensityVector scaled(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) scaled[i] = lambda * e[i];
      const DensityVector g = model.eval(t, scaled);
      double residual = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        residual = std::max(residual, std::abs(g[i] - base[i]));
      max_residual = std::max(max_residual, residual);
      if (residual > cfg.tol) {
        Violation v{s, t, {{"e", e}}, {{"lambda", lambda}, {"residual", residual}},
                    "field changed under positive scaling"};
        record(report, cfg, std::move(v));
      }
    }
  }
  report.metrics.emplace_back("max_residual", max_residual);
  finalize(report);
  return report;
}

namespace {

// Indices within a relative band of the extreme values; exact ties included.
void extreme_sets(const DensityVector& e, std::vector<int>& max_set,
                  std::vector<int>& min_set) {
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  max_set.clear();
  min_set.clear();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] >= *hi - 1e-12 * std::abs(*hi)) max_set.push_back(static_cast<int>(i));
    if (e[i] <= *lo + 1e-12 * std::abs(*lo)) min_set.push_back(static_cast<int>(i));
  }
}

}  // namespace

CheckReport check_ray_contraction(const ExcessDemandModel& model,
                                  const CheckConfig& cfg) {
  CheckReport report = make_report("a5", model, cfg);
  Rng rng(cfg.seed);
  const int m = model.dimension();
  if (m < 2) {
    report.verdict = Verdict::NotApplicable;
    report.note = "needs at least two components";
    return report;
  }
  long long ties = 0;
  std::vector<int> max_set, min_set;
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const DensityVector e = cone_point(rng, m);
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    if (*hi - *lo <= kProportionalTol * *hi) {  // on the ray: condition is vacuous
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    const DensityVector g = model.eval(t, e);
    extreme_sets(e, max_set, min_set);
    if (max_set.size() > 1 || min_set.size() > 1) ++ties;
    const bool max_ok = std::any_of(max_set.begin(), max_set.end(), [&](int i) {
      return g[static_cast<std::size_t>(i)] < 0.0;
    });
    const bool min_ok = std::any_of(min_set.begin(), min_set.end(), [&](int i) {
      return g[static_cast<std::size_t>(i)] > 0.0;
    });
    if (!max_ok || !min_ok) {
      Violation v{s, t, {{"e", e}, {"g", g}},
                  {{"max_index", max_set.front()}, {"min_index", min_set.front()}},
                  !max_ok ? "no maximal component with negative rate"
                          : "no minimal component with positive rate"};
      record(report, cfg, std::move(v));
    }
  }
  report.metrics.emplace_back("ties", static_cast<double>(ties));
  finalize(report);
  return report;
}

CheckReport check_pairwise_crossing(const ExcessDemandModel& model,
                                    const CheckConfig& cfg) {
  CheckReport report = make_report("lemma1", model, cfg);
  Rng rng(cfg.seed);
  const int m = model.dimension();
  if (m < 2) {
    report.verdict = Verdict::NotApplicable;
    report.note = "needs at least two components";
    return report;
  }
  for (long long s = 0; s < cfg.samples; ++s) {
    ++report.samples;
    const double t = rng.uniform(cfg.t_lo, cfg.t_hi);
    const DensityVector u = cone_point(rng, m);
    const DensityVector v = cone_point(rng, m);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = u[i] / v[i];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    if (rmax - rmin <= kProportionalTol * rmax) {  // proportional pair: excluded
      ++report.skipped;
      continue;
    }
    ++report.evaluated;
    const DensityVector gu = model.eval(t, u);
    const DensityVector gv = model.eval(t, v);
    bool lower = false, higher = false;
    for (std::size_t i = 0; i < gu.size(); ++i) {
      if (gu[i] < gv[i]) lower = true;
      if (gu[i] > gv[i]) higher = true;
    }
    if (!lower || !higher) {
      Violation viol{s, t, {{"u", u}, {"v", v}, {"g_u", gu}, {"g_v", gv}}, {},
                     !lower ? "no component rate strictly lower at u"
                            : "no component rate strictly higher at u"};
      record(report, cfg, std::move(viol));
    }
  }
  finalize(report);
  return report;
}

namespace {

const DensityVector& find_vector(const Violation& v, const char* name) {
  for (const auto& [key, vec] : v.vectors)
    if (key == name) return vec;
  throw StructuralError(std::string("violation record is missing vector '") + name + "'");
}

double find_value(const Violation& v, const char* name) {
  for (const auto& [key, x] : v.values)
    if (key == name) return x;
  throw StructuralError(std::string("violation record is missing value '") + name + "'");
}

}  // namespace

bool replay_violation(const ExcessDemandModel& model, const std::string& property,
                      const Violation& violation, double tol) {
  const double t = violation.t;
  if (property == "gs") {
    const int pivot = static_cast<int>(find_value(violation, "pivot"));
    const double g_lo = model.eval(t, find_vector(violation, "e_lo"))[static_cast<std::size_t>(pivot)];
    const double g_hi = model.eval(t, find_vector(violation, "e_hi"))[static_cast<std::size_t>(pivot)];
    return g_lo > g_hi + tol * std::max({1.0, std::abs(g_lo), std::abs(g_hi)});
  }
  if (property == "strong-gs") {
    const int pivot = static_cast<int>(find_value(violation, "pivot"));
    const double g_lo = model.eval(t, find_vector(violation, "e_lo"))[static_cast<std::size_t>(pivot)];
    const double g_hi = model.eval(t, find_vector(violation, "e_hi"))[static_cast<std::size_t>(pivot)];
    return !(g_lo < g_hi);
  }
  if (property == "class-n") {
    const int face = static_cast<int>(find_value(violation, "face"));
    const double rate = model.eval(t, find_vector(violation, "e"))[static_cast<std::size_t>(face)];
    return rate < -tol * std::max(1.0, std::abs(rate));
  }
  if (property == "homogeneity") {
    const double lambda = find_value(violation, "lambda");
    const DensityVector& e = find_vector(violation, "e");
    DensityVector scaled(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) scaled[i] = lambda * e[i];
    const DensityVector base = model.eval(t, e);
    const DensityVector g = model.eval(t, scaled);
    double residual = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      residual = std::max(residual, std::abs(g[i] - base[i]));
    return residual > tol;
  }
  if (property == "a5") {
    const DensityVector& e = find_vector(violation, "e");
    const DensityVector g = model.eval(t, e);
    std::vector<int> max_set, min_set;
    extreme_sets(e, max_set, min_set);
    const bool max_ok = std::any_of(max_set.begin(), max_set.end(), [&](int i) {
      return g[static_cast<std::size_t>(i)] < 0.0;
    });
    const bool min_ok = std::any_of(min_set.begin(), min_set.end(), [&](int i) {
      return g[static_cast<std::size_t>(i)] > 0.0;
    });
    return !max_ok || !min_ok;
  }
  if (property == "lemma1") {
    const DensityVector gu = model.eval(t, find_vector(violation, "u"));
    const DensityVector gv = model.eval(t, find_vector(violation, "v"));
    bool lower = false, higher = false;
    for (std::size_t i = 0; i < gu.size(); ++i) {
      if (gu[i] < gv[i]) lower = true;
      if (gu[i] > gv[i]) higher = true;
    }
    return !lower || !higher;
  }
  throw ConfigError("unknown property '" + property + "'");
}

// ---------------------------------------------------------------------------
// Equilibrium scan
// ---------------------------------------------------------------------------

ScanReport scan_equilibria(const ExcessDemandModel& model, const ScanConfig& cfg) {
  const int m = model.dimension();
  if (m != 2 && m != 3)
    throw UnsupportedDimensionError("brute-force scan supports dimension 2 or 3, got " +
                                    std::to_string(m));
  if (cfg.grid < 8) throw ConfigError("grid resolution too small");

  ScanReport report;
  report.model_id = model.id();
  report.grid = cfg.grid;

  const int res = cfg.grid;
  const double total = static_cast<double>(m);
  const double s = (total - m * cfg.delta) / (res - 1);
  report.spacing = s;

  // Grid over the simplex {sum e = m, e_i >= delta}, parameterized by the
  // first m-1 coordinates. Neighboring points differ by s in the sup norm.
  std::vector<DensityVector> points;
  std::vector<DensityVector> values;
  std::vector<long long> index;  // flat (i[,j]) -> points index, -1 if off-simplex
  const long long cells = m == 2 ? res : static_cast<long long>(res) * res;
  index.assign(static_cast<std::size_t>(cells), -1);

  auto push_point = [&](long long cell, DensityVector e) {
    index[static_cast<std::size_t>(cell)] = static_cast<long long>(points.size());
    values.push_back(model.eval(cfg.t, e));
    points.push_back(std::move(e));
  };

  if (m == 2) {
    for (int i = 0; i < res; ++i) {
      const double x = cfg.delta + i * s;
      push_point(i, {x, total - x});
    }
  } else {
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        const double x = cfg.delta + i * s;
        const double y = cfg.delta + j * s;
        const double z = total - x - y;
        if (z < cfg.delta - 1e-12) continue;
        push_point(static_cast<long long>(i) * res + j, {x, y, z});
      }
  }
  report.points_scanned = static_cast<long long>(points.size());

  // Neighbors with their sup-norm distances in state space. For m = 3 the
  // full 8-stencil is needed: the sup-residual can have diagonal valleys
  // an axis stencil cannot see.
  struct Neighbor {
    long long p;
    double dist;
  };
  auto neighbor_indices = [&](long long cell, std::vector<Neighbor>& out) {
    out.clear();
    auto add = [&](long long c, double dist) {
      const long long q = index[static_cast<std::size_t>(c)];
      if (q >= 0) out.push_back({q, dist});
    };
    if (m == 2) {
      if (cell > 0) add(cell - 1, s);
      if (cell + 1 < res) add(cell + 1, s);
    } else {
      const long long i = cell / res, j = cell % res;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long long ni = i + di, nj = j + dj;
          if (ni < 0 || ni >= res || nj < 0 || nj >= res) continue;
          // state change (di*s, dj*s, -(di+dj)*s)
          const double dist =
              s * std::max({std::abs(di), std::abs(dj), std::abs(di + dj)});
          add(ni * res + nj, dist);
        }
    }
  };

  auto residual_at = [&](long long p) {
    double r = 0.0;
    for (double x : values[static_cast<std::size_t>(p)]) r = std::max(r, std::abs(x));
    return r;
  };

  std::vector<Neighbor> neighbors;
  bool all_on_ray = true;
  for (long long cell = 0; cell < cells; ++cell) {
    const long long p = index[static_cast<std::size_t>(cell)];
    if (p < 0) continue;
    const DensityVector& g = values[static_cast<std::size_t>(p)];
    const double residual = residual_at(p);

    // A flagged near-zero must (a) be a local minimum of the residual on
    // the stencil -- around an isolated zero the residual decreases toward
    // it, so only the cell holding the zero survives -- and (b) have every
    // component within first-order reach of zero against that component's
    // own grid-neighbor slope. Judging the sup-residual against the
    // sup-slope instead would let one component's boundary blowup vouch
    // for another's large value. The 1.5 covers diagonal offsets of the
    // nearest grid point; the absolute floor catches exactly-flat zero
    // regions.
    neighbor_indices(cell, neighbors);
    bool local_min = true;
    bool within_reach = true;
    for (int c = 0; c < m; ++c) {
      double slope = 0.0;
      for (const Neighbor& q : neighbors)
        slope = std::max(slope,
                         std::abs(g[static_cast<std::size_t>(c)] -
                                  values[static_cast<std::size_t>(q.p)][static_cast<std::size_t>(c)]) /
                             q.dist);
      if (std::abs(g[static_cast<std::size_t>(c)]) >= std::max(1.5 * slope * s, 1e-12))
        within_reach = false;
    }
    for (const Neighbor& q : neighbors)
      if (residual_at(q.p) < residual) local_min = false;
    if (local_min && within_reach) {
      ++report.hit_count;
      const DensityVector& e = points[static_cast<std::size_t>(p)];
      const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
      const double ray_dist = (*hi - *lo) / 2.0;
      if (ray_dist >= s) all_on_ray = false;
      if (static_cast<int>(report.hits.size()) < cfg.max_recorded)
        report.hits.push_back({e, residual, ray_dist});
    }
  }

  if (report.hit_count == 0) {
    report.verdict = Verdict::Fail;
    report.note = "no near-zeros found on the simplex";
  } else {
    report.verdict = all_on_ray ? Verdict::Pass : Verdict::Fail;
    if (!all_on_ray) report.note = "near-zero found away from the ray";
  }
  return report;
}

}  // namespace rayflow
