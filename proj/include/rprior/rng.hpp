#pragma once

// Reproducible random streams: xoshiro256** seeded through SplitMix64, with
// substreams derived by hashing (base seed, tag, i, j).

#include <array>
#include <cstdint>

namespace rprior {

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the substream (tag, i, j) under `base`. Distinct tuples give
/// statistically independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t i,
                          std::uint64_t j);

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal by inverse CDF.
  double normal();

  /// Cauchy(0, scale) by inverse CDF.
  double cauchy(double scale);

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace rprior
