#pragma once

#include <cstdint>

namespace mubtomo {

/// Deterministic random stream with explicit sampling algorithms, so that a
/// fixed (seed, stream) pair reproduces the same draws on every platform.
/// Substreams derived from the same seed are independent for all practical
/// purposes; use one per measurement setting, restart, or bootstrap replica.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (no rejection, fixed draw count).
  double normal();

  /// Poisson-distributed count; inversion for small means, transformed
  /// rejection (PTRS) for large ones.
  long long poisson(double mean);

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used for seed scrambling and substream derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace mubtomo
