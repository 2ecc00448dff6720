#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace qkdnet {

/// SplitMix64 finalizer applied to `x + 0x9e3779b97f4a7c15`.
std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream split. The engine for round `round` of trial `trial`
/// is seeded with
///
///   k0 = splitmix64(root)
///   k1 = splitmix64(k0 ^ trial)
///   k2 = splitmix64(k1 ^ round)
///
/// so every (trial, round) pair owns an independent stream. Adding trials or
/// rounds never perturbs the streams of earlier ones, and rounds can run in
/// any order (or concurrently) without changing the session result.
std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t trial, std::uint64_t round);

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the sampling helpers below are written
/// out here (not delegated to <random> distributions) so results do not
/// depend on the standard library vendor.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_round(std::uint64_t root, std::uint64_t trial, std::uint64_t round) {
    return Rng(derive_stream_seed(root, trial, round));
  }

  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). Unbiased (rejection on the top residue).
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p);

  /// Poisson(mu) by sequential inversion. Means above 16 are split into
  /// chunks of at most 16 and summed.
  unsigned poisson(double mu);

 private:
  std::mt19937_64 engine_;
};

}  // namespace qkdnet
