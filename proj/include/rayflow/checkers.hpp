#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rayflow/models.hpp"

namespace rayflow {

/// Shared knobs for the randomized property samplers. Identical
/// (model, seed, config) triples produce byte-identical reports.
struct CheckConfig {
  long long samples = 10000;
  std::uint64_t seed = 0;
  double tol = 1e-12;  // relative tolerance for the non-strict checks
  double t_lo = 0.0;   // sampled evaluation times
  double t_hi = 100.0;
  int max_recorded = 10;  // violations kept in the report (count is exact)
};

/// One refuting sample: enough inputs to replay the evaluation in isolation.
struct Violation {
  long long sample = -1;
  double t = 0.0;
  std::vector<std::pair<std::string, DensityVector>> vectors;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

enum class Verdict { Pass, Fail, NotApplicable };

struct CheckReport {
  std::string property;  // gs | strong-gs | class-n | homogeneity | a5 | lemma1
  std::string model_id;
  Verdict verdict = Verdict::NotApplicable;
  long long samples = 0;    // drawn
  long long evaluated = 0;  // tested after skips
  long long skipped = 0;
  long long violation_count = 0;
  std::vector<Violation> violations;  // first max_recorded, in sample order
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;
};

/// Raising other components (pivot fixed) must not lower the pivot's rate.
CheckReport check_gross_substitute(const ExcessDemandModel& model, const CheckConfig& cfg);

/// Strictly raising every other component must strictly raise the pivot's
/// rate; equality counts as a violation (no slack on the strict side).
CheckReport check_strong_gross_substitute(const ExcessDemandModel& model,
                                          const CheckConfig& cfg);

/// Rate i must be nonnegative on the boundary face e_i = 0. Not applicable
/// to open-cone models, which are undefined there.
CheckReport check_boundary_nonnegative(const ExcessDemandModel& model,
                                       const CheckConfig& cfg);

/// g(t, lambda*e) = g(t, e) for lambda in {0.5, 2, 10}. Cone draws use
/// truncated mantissas so the scalings are exact in floating point; the
/// max residual across all samples is reported as a metric.
CheckReport check_homogeneity(const ExcessDemandModel& model, const CheckConfig& cfg);

/// Off the ray, some maximal component must have a negative rate and some
/// minimal component a positive one. Ties are tested existentially and
/// counted in the metrics.
CheckReport check_ray_contraction(const ExcessDemandModel& model, const CheckConfig& cfg);

/// For non-proportional positive u, v: some component rate is strictly
/// lower at u than at v and some other strictly higher.
CheckReport check_pairwise_crossing(const ExcessDemandModel& model, const CheckConfig& cfg);

/// Re-evaluates a recorded violation in isolation; true when it still
/// refutes the property. Supports every property above.
bool replay_violation(const ExcessDemandModel& model, const std::string& property,
                      const Violation& violation, double tol);

// ---------------------------------------------------------------------------
// Brute-force equilibrium scan
// ---------------------------------------------------------------------------

struct ScanConfig {
  int grid = 200;      // points per axis
  double t = 0.0;      // evaluation time
  double delta = 1e-2; // distance kept from the simplex boundary
  int max_recorded = 50;
};

struct ScanHit {
  DensityVector point;
  double residual = 0.0;      // ||g||_sup at the point
  double ray_distance = 0.0;
};

struct ScanReport {
  std::string model_id;
  Verdict verdict = Verdict::Fail;
  int grid = 0;
  double spacing = 0.0;
  long long points_scanned = 0;
  long long hit_count = 0;
  std::vector<ScanHit> hits;  // first max_recorded
  std::string note;
};

/// Scans the simplex {sum e = m, e_i > delta} on a uniform grid and flags
/// near-zeros of the field (threshold scaled by a local Lipschitz estimate
/// from grid-neighbor differences). Pass iff near-zeros exist and all lie
/// within one grid spacing of the ray. Dimension 2 or 3 only.
ScanReport scan_equilibria(const ExcessDemandModel& model, const ScanConfig& cfg);

std::string verdict_token(Verdict v);

}  // namespace rayflow
