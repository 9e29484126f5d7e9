// Projective optical probe: dark/bright state reduction, Poisson photon
// counting, threshold classification and probe-induced Zeeman pumping.
#pragma once

#include <cstdint>
#include <utility>

#include "zeno/rng.hpp"
#include "zeno/spin.hpp"

namespace zeno {

/// 0 = "off" / dark / F=0, 1 = "on" / bright / F=1.
using Bit = std::uint8_t;

struct DetectorModel {
  double mean_counts_bright = 8.0;  ///< lambda_on, counts per probe window
  double mean_counts_dark = 0.215;  ///< lambda_off, counts per probe window
  std::uint32_t threshold = 2;      ///< classify "on" when count >= threshold

  /// Dark-count-free detector with a negligible bright miss rate.
  static DetectorModel ideal() { return DetectorModel{50.0, 0.0, 2}; }

  /// Throws std::invalid_argument unless lambda_on > lambda_off >= 0 and threshold >= 1.
  void validate() const;

  bool operator==(const DetectorModel&) const = default;
};

struct ProbeOutcome {
  Bit true_manifold = 0;
  std::uint32_t photon_count = 0;
  Bit classified_bit = 0;
  SpinState post_state;
};

struct FalseRates {
  double false_on = 0.0;   ///< P(count >= threshold | dark)
  double false_off = 0.0;  ///< P(count < threshold | bright)
};

/// Born-rule reduction onto the dark or bright manifold.
std::pair<Bit, SpinState> project(const SpinState& state, Rng& rng);

std::uint32_t sample_counts(Bit manifold, const DetectorModel& model, Rng& rng);

constexpr Bit classify(std::uint32_t count, const DetectorModel& model) noexcept {
  return count >= model.threshold ? Bit{1} : Bit{0};
}

/// Quantum-jump unraveling of probe-induced pumping out of |F=1,m=0>.
SpinState zeeman_pump(const SpinState& state, const NoiseParams& params, Rng& rng);

/// project -> (bright only) Zeeman pump -> photon counts -> classification.
ProbeOutcome probe(const SpinState& state, const DetectorModel& model, const NoiseParams& params,
                   Rng& rng);

FalseRates false_rates(const DetectorModel& model);

/// P(N <= k) for N ~ Poisson(mean); 0 for k < 0.
double poisson_cdf(long k, double mean);

// Density-matrix counterparts, used as the exact oracle.

/// Non-selective measurement: removes all dark/bright coherences.
DensityMatrix measure_density(const DensityMatrix& rho);

/// Zeeman pump channel, applied to the bright block only.
DensityMatrix zeeman_pump_density(const DensityMatrix& rho, const NoiseParams& params);

/// Ensemble-averaged effect of `probe` on the ion.
DensityMatrix probe_density(const DensityMatrix& rho, const NoiseParams& params);

}  // namespace zeno
