#pragma once

#include <memory>

#include "rayflow/models.hpp"
#include "rayflow/rng.hpp"

namespace rayflow {

/// Random substitute-coupled linear system with a random orthant start
/// (occasional exact zeros on the boundary). Diagonals in [-2, -0.3];
/// row coupling strength up to 1.2x the diagonal, so unstable draws occur
/// and positivity is exercised beyond the stable case.
struct MetzlerInstance {
  std::shared_ptr<LinearModel> model;
  DensityVector start;
};

MetzlerInstance random_metzler_instance(Rng& rng, int max_dim = 8);

/// Random ratio-consensus instance paired with a cone start whose
/// components lie in [1e-2, 1e2]. Each run draws a scale s; components sit
/// in [s, 30s] and the complete-digraph weights are drawn from
/// [30, 50] * s / m. Matching the weights to the scale keeps the fixed
/// 1e-3 step inside the explicit scheme's stability region at every scale
/// while still reaching the ray well before t = 50.
struct RatioInstance {
  std::shared_ptr<RatioConsensusModel> model;
  DensityVector start;
  double scale = 1.0;
};

RatioInstance random_ratio_instance(Rng& rng, int max_dim = 10);

/// Strongly connected weight digraph: a directed ring plus a random subset
/// of the remaining arcs, weights uniform in [lo, hi].
Matrix random_irreducible_weights(Rng& rng, int m, double lo, double hi);

/// Block-diagonal weights with no arcs between the two blocks: the standard
/// reducible counterexample whose equilibria leave the ray.
Matrix two_block_weights(int first_block, int total);

}  // namespace rayflow
