// Experiment schedules: Zeno trajectories, Rabi and Ramsey calibration scans,
// and fractionated-pi series with or without intermediate probing.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zeno/detector.hpp"
#include "zeno/rng.hpp"
#include "zeno/spin.hpp"

namespace zeno {

enum class Protocol { zeno, fractionated, rabi, ramsey };

/// Fractionated-pi schedules.
enum class Variant {
  single_pi,               ///< (a) one pi pulse, final probe only
  fractionated_no_probe,   ///< (b) n pulses of pi/n, final probe only
  fractionated_with_probe  ///< (c) n pulses of pi/n, probe after every pulse
};

std::string_view to_string(Protocol protocol);
std::string_view to_string(Variant variant);

struct ScanSettings {
  double step = 1e-4;  ///< s; pulse-length increment (Rabi) or gap increment (Ramsey)
  std::size_t steps = 500;
  std::size_t trajectories = 50;

  bool operator==(const ScanSettings&) const = default;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::zeno;
  PulseSpec pulse;
  double probe_duration = 2e-3;  ///< s; also the idle intermission of variant (b)
  DetectorModel detector;
  NoiseParams noise;
  std::size_t measurements = 10000;  ///< Zeno trajectory length
  std::size_t series = 2000;         ///< fractionated series count
  unsigned fractionation = 1;        ///< n
  Variant variant = Variant::fractionated_with_probe;
  std::uint64_t master_seed = 1;
  bool reprepare_after_on = false;   ///< Zeno: re-pump to |0> after every "on"
  ScanSettings scan;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct Trajectory {
  ExperimentConfig config;
  std::uint64_t seed = 0;  ///< stream seed actually used
  bool prepared_ok = true;
  std::vector<ProbeOutcome> outcomes;
  std::vector<PulseSpec> drives;  ///< drive applied before each probe

  [[nodiscard]] std::vector<Bit> classified_bits() const;
  [[nodiscard]] std::vector<Bit> true_bits() const;
};

struct SeriesRecord {
  std::vector<Bit> intermediate_bits;  ///< n-1 bits for variant (c), otherwise empty
  Bit final_bit = 0;
  bool prepared_ok = true;
  std::vector<std::uint32_t> counts;   ///< photon count of every probe, in order
  std::vector<Bit> true_bits;          ///< simulation truth of every probe, in order

  [[nodiscard]] bool all_off() const;

  bool operator==(const SeriesRecord&) const = default;
};

/// Initial |0> preparation, failing with probability f_prep into the configured sink.
SpinState prepare(const NoiseParams& noise, Rng& rng, bool* ok = nullptr);

Trajectory run_zeno_trajectory(const ExperimentConfig& config);

/// One fractionated series, drawn from substream `index` of the master seed.
SeriesRecord run_series(const ExperimentConfig& config, std::uint64_t index);

/// `config.series` independent series, in index order.
std::vector<SeriesRecord> run_fractionated_pi(const ExperimentConfig& config);

struct ScanResult {
  std::vector<double> times;             ///< pulse length (Rabi) or gap (Ramsey), s
  std::vector<std::vector<Bit>> bits;    ///< [trajectory][step] classified bits

  /// Mean classified bit per step.
  [[nodiscard]] std::vector<double> bright_fraction() const;
};

/// Step k = 1..n_steps: prepare, drive for k * tau_step, probe.
ScanResult run_rabi_scan(const ExperimentConfig& config, double tau_step, std::size_t n_steps,
                         std::size_t n_trajectories);

/// Step k = 1..n_steps: prepare, pulse, precess for k * gap_step, pulse, probe.
ScanResult run_ramsey_scan(const ExperimentConfig& config, double gap_step, std::size_t n_steps,
                           std::size_t n_trajectories);

/// Exact probability (density-matrix oracle, ideal detector) that every probe
/// of a fractionated series finds the ion dark.  For variant (c) intermediate
/// probes are selective; for (a)/(b) only the final one exists.
double oracle_series_survival(const ExperimentConfig& config);

/// Dephasing rate at which `oracle_series_survival` equals `target`, by
/// bisection.  Throws std::domain_error if the target is unreachable.
double calibrate_dephasing(ExperimentConfig config, double target);

}  // namespace zeno
