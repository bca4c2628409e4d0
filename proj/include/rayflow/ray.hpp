#pragma once

#include <span>
#include <vector>

namespace rayflow {

/// Sup-norm projection of a state onto the all-ones ray.
///
/// For the sup norm the nearest ray point lambda*1 has lambda at the
/// Chebyshev center of the component set, (max + min) / 2, and the distance
/// is half the component range. active_set collects the indices attaining
/// the maximal deviation within a relative tie band: in the attraction
/// argument the attained set must be a band, not an exact argmax.
struct RayProjection {
  double lambda_star = 0.0;
  double distance = 0.0;
  std::vector<int> active_set;
};

RayProjection ray_project(std::span<const double> e, double tie_tol = 1e-9);

/// Distance only, no active set (cheap enough for per-step monitors).
double ray_distance(std::span<const double> e);

}  // namespace rayflow
