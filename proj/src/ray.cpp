#include "rayflow/ray.hpp"

#include <algorithm>
#include <cmath>

#include "rayflow/errors.hpp"

namespace rayflow {

double ray_distance(std::span<const double> e) {
  if (e.empty()) throw StructuralError("cannot project an empty state");
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const double mid = (*hi + *lo) / 2.0;
  if (mid <= 0.0) {
    // The ray is {lambda*1 : lambda > 0}; for states whose Chebyshev
    // center is nonpositive the infimum is approached as lambda -> 0.
    double d = 0.0;
    for (double x : e) d = std::max(d, std::abs(x));
    return d;
  }
  return (*hi - *lo) / 2.0;
}

RayProjection ray_project(std::span<const double> e, double tie_tol) {
  if (e.empty()) throw StructuralError("cannot project an empty state");
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  RayProjection p;
  p.lambda_star = std::max((*hi + *lo) / 2.0, 0.0);
  double dmax = 0.0;
  for (double x : e) dmax = std::max(dmax, std::abs(x - p.lambda_star));
  p.distance = dmax;
  const double band = dmax * (1.0 - tie_tol);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (std::abs(e[i] - p.lambda_star) >= band) p.active_set.push_back(static_cast<int>(i));
  return p;
}

}  // namespace rayflow
