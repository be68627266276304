#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lmeval {

/// Seeded random source with hand-rolled distributions. The standard
/// library pins the mt19937_64 stream but not the distribution
/// algorithms, so variates are produced here directly to keep seeded
/// runs reproducible across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t bounded(std::uint64_t n);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape below ~1e-12 collapses
  /// to zero mass, which is the limit behaviour we want.
  double gamma(double shape);

  /// Dirichlet sample: normalized independent gammas.
  std::vector<double> dirichlet(const std::vector<double>& alpha);

  bool coin() { return (engine_() & 1ull) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates permutation of 0..n-1, deterministic for a given seed.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace lmeval
