#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace diffcal {

/// Seeded generator with a platform-independent normal sampler.
///
/// std::normal_distribution is implementation-defined, so traces would differ
/// between standard libraries; the Box-Muller transform below depends only on
/// mt19937_64 (fully specified) and libm.
class Rng {
 public:
  /// `stream` selects an independent sub-stream for the same seed.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace diffcal
