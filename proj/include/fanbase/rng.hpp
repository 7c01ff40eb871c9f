#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fanbase {

/// Derives a child seed from (seed, purpose, index). Every random decision in
/// the project flows from one top-level seed through this function, so studies
/// are reproducible bit-for-bit regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// is fixed by the standard) and converts to doubles with explicit bit
/// arithmetic, so the same seed gives the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no implementation-defined distributions).
  double normal();

  /// Uniform index in [0, n). Rejection sampling, unbiased.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fanbase
