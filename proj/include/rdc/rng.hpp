#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace rdc {

/// Seeded generator with hand-rolled variate transforms so that streams are
/// bit-identical across platforms (std distributions are not portable).
/// Named sub-streams keep noise, exploration, and evaluation independent:
/// advancing one never shifts another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derive an independent stream from a master seed and a stream tag.
  static Rng stream(std::uint64_t master_seed, std::string_view tag);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in {0, ..., n-1}. n must be positive.
  int uniform_int(int n) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

  /// Gaussian via Box-Muller; always consumes exactly two uniforms.
  double normal(double mu, double sigma);

  /// Sample an index from a probability vector by inverse-CDF walk.
  /// The vector is assumed normalized; residual mass goes to the last index.
  int categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used for seed/stream derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace rdc
