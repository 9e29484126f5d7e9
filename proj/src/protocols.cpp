#include "zeno/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zeno {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::zeno: return "zeno";
    case Protocol::fractionated: return "fractionated";
    case Protocol::rabi: return "rabi";
    case Protocol::ramsey: return "ramsey";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::single_pi: return "a";
    case Variant::fractionated_no_probe: return "b";
    case Variant::fractionated_with_probe: return "c";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  pulse.validate();
  detector.validate();
  noise.validate();
  if (!(probe_duration >= 0.0)) throw std::invalid_argument("probe duration must be >= 0");
  if (fractionation < 1) throw std::invalid_argument("fractionation n must be >= 1");
  if (variant == Variant::single_pi && fractionation != 1) {
    throw std::invalid_argument("variant (a) requires n = 1");
  }
  switch (protocol) {
    case Protocol::zeno:
      if (measurements == 0) throw std::invalid_argument("measurement count must be > 0");
      break;
    case Protocol::fractionated:
      if (series == 0) throw std::invalid_argument("series count must be > 0");
      break;
    case Protocol::rabi:
    case Protocol::ramsey:
      if (!(scan.step > 0.0)) throw std::invalid_argument("scan step must be > 0");
      if (scan.steps == 0 || scan.trajectories == 0) {
        throw std::invalid_argument("scan steps and trajectories must be > 0");
      }
      break;
  }
}

std::vector<Bit> Trajectory::classified_bits() const {
  std::vector<Bit> bits;
  bits.reserve(outcomes.size());
  for (const auto& o : outcomes) bits.push_back(o.classified_bit);
  return bits;
}

std::vector<Bit> Trajectory::true_bits() const {
  std::vector<Bit> bits;
  bits.reserve(outcomes.size());
  for (const auto& o : outcomes) bits.push_back(o.true_manifold);
  return bits;
}

bool SeriesRecord::all_off() const {
  return final_bit == 0 && std::all_of(intermediate_bits.begin(), intermediate_bits.end(),
                                       [](Bit b) { return b == 0; });
}

SpinState prepare(const NoiseParams& noise, Rng& rng, bool* ok) {
  const bool failed = noise.preparation_error > 0.0 && rng.bernoulli(noise.preparation_error);
  if (ok) *ok = !failed;
  if (!failed) return SpinState{};
  switch (noise.prep_sink) {
    case PrepSink::upper: return SpinState::basis(Level::upper);
    case PrepSink::zeeman: return SpinState::basis(rng.bernoulli(0.5) ? Level::minus : Level::plus);
  }
  return SpinState{};
}

Trajectory run_zeno_trajectory(const ExperimentConfig& config) {
  config.validate();
  Trajectory t;
  t.config = config;
  Rng rng = Rng::substream(config.master_seed, 0);
  t.seed = rng.seed();
  t.outcomes.reserve(config.measurements);
  t.drives.reserve(config.measurements);

  SpinState state = prepare(config.noise, rng, &t.prepared_ok);
  for (std::size_t k = 0; k < config.measurements; ++k) {
    state = drive_pulse(state, config.pulse, config.noise, rng);
    t.drives.push_back(config.pulse);
    ProbeOutcome outcome = probe(state, config.detector, config.noise, rng);
    state = apply_dephasing(outcome.post_state, config.probe_duration, config.noise, rng);
    if (config.reprepare_after_on && outcome.classified_bit == 1) state = prepare(config.noise, rng);
    t.outcomes.push_back(std::move(outcome));
  }
  return t;
}

SeriesRecord run_series(const ExperimentConfig& config, std::uint64_t index) {
  Rng rng = Rng::substream(config.master_seed, index);
  SeriesRecord record;
  SpinState state = prepare(config.noise, rng, &record.prepared_ok);
  const unsigned n = config.fractionation;
  const bool probed = config.variant == Variant::fractionated_with_probe;

  auto read = [&](const SpinState& s) {
    ProbeOutcome o = probe(s, config.detector, config.noise, rng);
    record.counts.push_back(o.photon_count);
    record.true_bits.push_back(o.true_manifold);
    return o;
  };

  for (unsigned k = 1; k <= n; ++k) {
    state = drive_pulse(state, config.pulse, config.noise, rng);
    if (k == n) break;
    if (probed) {
      ProbeOutcome o = read(state);
      record.intermediate_bits.push_back(o.classified_bit);
      state = o.post_state;
    }
    state = apply_dephasing(state, config.probe_duration, config.noise, rng);
  }
  record.final_bit = read(state).classified_bit;
  return record;
}

std::vector<SeriesRecord> run_fractionated_pi(const ExperimentConfig& config) {
  config.validate();
  std::vector<SeriesRecord> records;
  records.reserve(config.series);
  for (std::size_t i = 0; i < config.series; ++i) records.push_back(run_series(config, i));
  return records;
}

std::vector<double> ScanResult::bright_fraction() const {
  std::vector<double> mean(times.size(), 0.0);
  if (bits.empty()) return mean;
  for (const auto& row : bits) {
    for (std::size_t k = 0; k < row.size(); ++k) mean[k] += row[k];
  }
  for (double& m : mean) m /= static_cast<double>(bits.size());
  return mean;
}

namespace {

template <typename StepFn>
ScanResult run_scan(const ExperimentConfig& config, double step, std::size_t n_steps,
                    std::size_t n_trajectories, StepFn&& evolve) {
  if (!(step > 0.0)) throw std::invalid_argument("scan step must be > 0");
  config.pulse.validate();
  config.detector.validate();
  config.noise.validate();
  ScanResult result;
  result.times.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) result.times[k] = static_cast<double>(k + 1) * step;
  result.bits.assign(n_trajectories, std::vector<Bit>(n_steps, 0));
  for (std::size_t t = 0; t < n_trajectories; ++t) {
    const std::uint64_t trajectory_seed = Rng::substream_seed(config.master_seed, t);
    for (std::size_t k = 0; k < n_steps; ++k) {
      Rng rng = Rng::substream(trajectory_seed, k);
      SpinState state = prepare(config.noise, rng);
      state = evolve(state, result.times[k], rng);
      result.bits[t][k] = probe(state, config.detector, config.noise, rng).classified_bit;
    }
  }
  return result;
}

}  // namespace

ScanResult run_rabi_scan(const ExperimentConfig& config, double tau_step, std::size_t n_steps,
                         std::size_t n_trajectories) {
  return run_scan(config, tau_step, n_steps, n_trajectories,
                  [&](const SpinState& s, double duration, Rng& rng) {
                    PulseSpec pulse = config.pulse;
                    pulse.duration = duration;
                    return drive_pulse(s, pulse, config.noise, rng);
                  });
}

ScanResult run_ramsey_scan(const ExperimentConfig& config, double gap_step, std::size_t n_steps,
                           std::size_t n_trajectories) {
  return run_scan(config, gap_step, n_steps, n_trajectories,
                  [&](const SpinState& s, double gap, Rng& rng) {
                    SpinState state = drive_pulse(s, config.pulse, config.noise, rng);
                    state = free_evolution(state, gap, config.pulse.detuning);
                    state = apply_dephasing(state, gap, config.noise, rng);
                    return drive_pulse(state, config.pulse, config.noise, rng);
                  });
}

double oracle_series_survival(const ExperimentConfig& config) {
  const NoiseParams& noise = config.noise;
  const double f = noise.preparation_error;
  Matrix4c start = (1.0 - f) * DensityMatrix{}.entries();
  if (f > 0.0) {
    if (noise.prep_sink == PrepSink::upper) {
      start += f * DensityMatrix{SpinState::basis(Level::upper)}.entries();
    } else {
      start += 0.5 * f * DensityMatrix{SpinState::basis(Level::minus)}.entries();
      start += 0.5 * f * DensityMatrix{SpinState::basis(Level::plus)}.entries();
    }
  }
  // Unnormalized: the trace tracks the probability of the all-dark branch.
  DensityMatrix rho = DensityMatrix::from_trusted(start);
  const unsigned n = config.fractionation;
  const bool probed = config.variant == Variant::fractionated_with_probe;
  const int g = index_of(Level::ground);
  for (unsigned k = 1; k <= n; ++k) {
    rho = evolve_density(rho, config.pulse, noise);
    if (k == n) break;
    if (probed) {
      Matrix4c dark = Matrix4c::Zero();
      dark(g, g) = rho.entries()(g, g);
      rho = DensityMatrix::from_trusted(dark);
    }
    rho = dephase(rho, config.probe_duration, noise);
  }
  return rho.population(Level::ground);
}

double calibrate_dephasing(ExperimentConfig config, double target) {
  auto survival = [&](double rate) {
    config.noise.dephasing_rate = rate;
    return oracle_series_survival(config);
  };
  double lo = 0.0;
  double hi = 1.0;
  if (survival(lo) > target) throw std::domain_error("calibrate_dephasing: target below the noiseless survival");
  while (survival(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("calibrate_dephasing: target survival unreachable");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (survival(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace zeno
