#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rayflow {

/// Seeded generator with hand-rolled distributions.
///
/// std::mt19937_64 output is pinned by the standard, but the standard
/// distributions are not; mapping the raw bits ourselves keeps reports and
/// sweeps byte-identical for a given seed no matter which stdlib built them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Log-uniform on [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  /// Uniform integer in [lo, hi] inclusive (rejection-free modulo bias is
  /// irrelevant at the range sizes used here, but reject anyway).
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  /// Log-uniform draw snapped to a 21-bit mantissa. Exactly representable
  /// after multiplication by small decimal factors (e.g. 10), so degree-zero
  /// scale invariance can be tested for bit-exact equality.
  double log_uniform_dyadic(double lo, double hi) {
    const double v = log_uniform(lo, hi);
    int ex = 0;
    const double mant = std::frexp(v, &ex);  // mant in [0.5, 1)
    const double snapped = std::floor(mant * 2097152.0);  // 2^21
    return std::ldexp(snapped, ex - 21);
  }

  std::vector<double> vector(int n, double lo, double hi) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = uniform(lo, hi);
    return out;
  }

  std::vector<double> log_vector(int n, double lo, double hi) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = log_uniform(lo, hi);
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace rayflow
