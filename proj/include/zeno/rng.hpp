#pragma once

#include <cstdint>
#include <random>

namespace zeno {

/// Deterministic random source used by every stochastic operation.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives uniform and Poisson variates with explicit algorithms, so that a
/// given seed produces the same trajectory on every platform and toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_{seed}, seed_{seed} {}

  /// Independent stream for unit `index` of a run seeded with `master_seed`.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng{substream_seed(master_seed, index)};
  }

  /// Seed of substream `index`: splitmix64 finalizer over (master, index).
  static std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// True with probability `p`.
  bool bernoulli(double p) { return uniform() < p; }

  /// Poisson variate with the given mean, by sequential inversion of the CDF.
  std::uint32_t poisson(double mean);

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace zeno
