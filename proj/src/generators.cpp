#include "rayflow/generators.hpp"

#include <cmath>

#include "rayflow/errors.hpp"

namespace rayflow {

MetzlerInstance random_metzler_instance(Rng& rng, int max_dim) {
  const int m = rng.uniform_int(1, max_dim);
  Matrix a = Matrix::zero(m);
  for (int i = 0; i < m; ++i) {
    const double diag = -rng.uniform(0.3, 2.0);
    a(i, i) = diag;
    if (m == 1) continue;
    const double coupling = rng.uniform(0.0, 1.2) * std::abs(diag) / (m - 1);
    for (int j = 0; j < m; ++j)
      if (j != i) a(i, j) = coupling * rng.uniform01();
  }
  std::vector<double> b(static_cast<std::size_t>(m));
  for (auto& x : b) x = rng.uniform(0.0, 1.0);

  DensityVector start(static_cast<std::size_t>(m));
  for (auto& x : start) x = rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.0, 10.0);

  return {LinearModel::metzler(std::move(a), std::move(b), "metzler-random"),
          std::move(start)};
}

RatioInstance random_ratio_instance(Rng& rng, int max_dim) {
  const int m = rng.uniform_int(2, max_dim);
  const double ratio_span = 30.0;
  const double s = rng.log_uniform(1e-2, 1e2 / ratio_span);

  DensityVector start(static_cast<std::size_t>(m));
  for (auto& x : start) x = s * rng.log_uniform(1.0, ratio_span);

  Matrix w = Matrix::zero(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) w(i, j) = rng.uniform(30.0, 50.0) * s / m;

  return {RatioConsensusModel::constant(std::move(w), "ratio-random"),
          std::move(start), s};
}

Matrix random_irreducible_weights(Rng& rng, int m, double lo, double hi) {
  if (m < 2) throw ConfigError("irreducible weights need at least two components");
  Matrix w = Matrix::zero(m);
  for (int i = 0; i < m; ++i) w(i, (i + 1) % m) = rng.uniform(lo, hi);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && w(i, j) == 0.0 && rng.uniform01() < 0.5)
        w(i, j) = rng.uniform(lo, hi);
  return w;
}

Matrix two_block_weights(int first_block, int total) {
  if (first_block < 1 || first_block >= total)
    throw ConfigError("block sizes must be positive");
  Matrix w = Matrix::zero(total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      if (i == j) continue;
      const bool same_block = (i < first_block) == (j < first_block);
      if (same_block) w(i, j) = 1.0;
    }
  return w;
}

}  // namespace rayflow
