#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "zeno/commands.hpp"
#include "zeno/protocols.hpp"
#include "zeno/stats.hpp"

using namespace zeno;
using std::numbers::pi;

namespace {

ExperimentConfig zeno_config(double theta, std::size_t measurements) {
  ExperimentConfig c;
  c.protocol = Protocol::zeno;
  c.pulse = PulseSpec{theta / 4.9e-3, 4.9e-3, 0.0, 0.0};
  c.detector = DetectorModel::ideal();
  c.measurements = measurements;
  return c;
}

ExperimentConfig series_config(unsigned n, Variant variant, std::size_t series) {
  ExperimentConfig c;
  c.protocol = Protocol::fractionated;
  c.pulse = PulseSpec{pi / n / 2.9e-3, 2.9e-3, 0.0, 0.0};
  c.probe_duration = 3e-3;
  c.detector = DetectorModel::ideal();
  c.fractionation = n;
  c.variant = variant;
  c.series = series;
  return c;
}

double frequency(const std::vector<SeriesRecord>& records, bool (*pred)(const SeriesRecord&)) {
  return static_cast<double>(std::count_if(records.begin(), records.end(), pred)) / records.size();
}

}  // namespace

TEST_CASE("Zeno trajectory examples") {
  const Trajectory flop = run_zeno_trajectory(zeno_config(pi, 1000));
  REQUIRE(flop.outcomes.size() == 1000);
  for (std::size_t k = 0; k < flop.outcomes.size(); ++k) REQUIRE(flop.outcomes[k].classified_bit == (k + 1) % 2);

  const Trajectory idle = run_zeno_trajectory(zeno_config(0.0, 1000));
  for (const auto& o : idle.outcomes) REQUIRE(o.classified_bit == 0);

  ExperimentConfig c = zeno_config(pi, 200);
  c.reprepare_after_on = true;
  for (const auto& o : run_zeno_trajectory(c).outcomes) REQUIRE(o.classified_bit == 1);
}

TEST_CASE("Zeno trajectory at pi/2 has geometric runs") {
  const Trajectory t = run_zeno_trajectory(zeno_config(pi / 2, 100000));
  const auto bits = t.classified_bits();
  const RunLengthHistogram h = extract_runs(bits);
  const double s1 = static_cast<double>(h.runs_at_least(0, 1));
  for (std::size_t q = 1; q <= 8; ++q) {
    const double v = std::pow(0.5, double(q - 1));
    CHECK(std::abs(sequence_ratio(h, q) - v) <= 4 * oracle::binomial_sigma(v, s1) + 1e-15);
  }
  double mean = 0.0;
  for (std::size_t q = 1; q <= h.max_run(0); ++q) mean += double(q) * h.count(0, q);
  mean /= double(h.total_runs(0));
  // geometric with p = 1/2: mean 2, variance 2
  CHECK(std::abs(mean - 2.0) < 4 * std::sqrt(2.0 / h.total_runs(0)));
}

TEST_CASE("trajectories replay bit-for-bit") {
  ExperimentConfig c = zeno_config(1.03 * pi, 5000);
  c.detector = DetectorModel{};
  c.noise = NoiseParams{0.5, 0.01, 0.1, PrepSink::upper};
  c.master_seed = 99;
  const Trajectory a = run_zeno_trajectory(c);
  const Trajectory b = run_zeno_trajectory(c);
  CHECK(a.seed == b.seed);
  CHECK(a.classified_bits() == b.classified_bits());
  CHECK(a.true_bits() == b.true_bits());
  c.master_seed = 100;
  CHECK(run_zeno_trajectory(c).classified_bits() != a.classified_bits());
}

TEST_CASE("fractionated series examples") {
  const auto a = run_fractionated_pi(series_config(1, Variant::single_pi, 2000));
  for (const auto& r : a) {
    REQUIRE(r.final_bit == 1);
    REQUIRE(r.intermediate_bits.empty());
  }

  const std::size_t n_series = 100000;
  const auto c2 = run_fractionated_pi(series_config(2, Variant::fractionated_with_probe, n_series));
  const double f2 = frequency(c2, [](const SeriesRecord& r) { return r.all_off(); });
  CHECK(std::abs(f2 - 0.25) <= 4 * oracle::binomial_sigma(0.25, n_series));

  const auto c9 = run_fractionated_pi(series_config(9, Variant::fractionated_with_probe, n_series));
  const oracle::SeriesLaw law = oracle::enumerate_series(9);
  const double f9 = frequency(c9, [](const SeriesRecord& r) { return r.all_off(); });
  CHECK(std::abs(f9 - law.all_off) <= 4 * oracle::binomial_sigma(law.all_off, n_series));
  const double final9 = frequency(c9, [](const SeriesRecord& r) { return r.final_bit == 0; });
  CHECK(std::abs(final9 - law.final_off) <= 4 * oracle::binomial_sigma(law.final_off, n_series));
  for (const auto& r : c9) {
    REQUIRE(r.intermediate_bits.size() == 8);
    REQUIRE(r.counts.size() == 9);
    REQUIRE(r.true_bits.size() == 9);
  }
}

TEST_CASE("unprobed fractionated pulses compose to a flip") {
  for (unsigned n = 1; n <= 9; ++n) {
    const auto records = run_fractionated_pi(series_config(n, Variant::fractionated_no_probe, 20000));
    const double survival = frequency(records, [](const SeriesRecord& r) { return r.final_bit == 0; });
    CHECK(survival == 0.0);
    CHECK(oracle_series_survival(series_config(n, Variant::fractionated_no_probe, 1)) < 1e-12);
  }
}

TEST_CASE("series substreams are independent of execution order") {
  const ExperimentConfig c = [] {
    ExperimentConfig c = series_config(5, Variant::fractionated_with_probe, 3000);
    c.detector = DetectorModel{};
    c.noise = NoiseParams{2.0, 0.05, 0.1, PrepSink::upper};
    c.master_seed = 2024;
    return c;
  }();
  const auto forward = run_fractionated_pi(c);
  std::vector<SeriesRecord> backward;
  for (std::size_t i = c.series; i-- > 0;) backward.push_back(run_series(c, i));
  std::reverse(backward.begin(), backward.end());
  CHECK(forward == backward);

  std::vector<SeriesRecord> shuffled = forward;
  Rng rng(1);
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.next() % i]);
  const SeriesView view{c.variant, c.fractionation};
  CHECK(estimate_selective(shuffled, view).raw_frequency == estimate_selective(forward, view).raw_frequency);
  CHECK(estimate_nonselective(shuffled, view).raw_frequency == estimate_nonselective(forward, view).raw_frequency);
}

TEST_CASE("series oracle agrees with enumeration and Monte-Carlo") {
  for (unsigned n = 1; n <= 12; ++n) {
    const double exact = oracle::enumerate_series(n).all_off;
    CHECK(oracle_series_survival(series_config(n, Variant::fractionated_with_probe, 1)) ==
          doctest::Approx(exact).epsilon(1e-12));
  }

  ExperimentConfig c = series_config(4, Variant::fractionated_no_probe, 100000);
  c.noise = NoiseParams{30.0, 0.0, 0.05, PrepSink::upper};
  const double expected = oracle_series_survival(c);
  const auto records = run_fractionated_pi(c);
  const double got = frequency(records, [](const SeriesRecord& r) { return r.final_bit == 0; });
  CHECK(std::abs(got - expected) <= 4 * oracle::binomial_sigma(expected, c.series));

  c.variant = Variant::fractionated_with_probe;
  c.noise.prep_sink = PrepSink::zeeman;
  const double expected_c = oracle_series_survival(c);
  const double got_c = frequency(run_fractionated_pi(c), [](const SeriesRecord& r) { return r.all_off(); });
  CHECK(std::abs(got_c - expected_c) <= 4 * oracle::binomial_sigma(expected_c, c.series));
}

TEST_CASE("dephasing calibration") {
  const ExperimentConfig c = series_config(9, Variant::fractionated_no_probe, 1);
  const double gamma = calibrate_dephasing(c, 0.10);
  CHECK(gamma > 0.0);
  ExperimentConfig at = c;
  at.noise.dephasing_rate = gamma;
  CHECK(oracle_series_survival(at) == doctest::Approx(0.10).epsilon(1e-9));
  at.probe_duration = 5e-3;
  CHECK(oracle_series_survival(at) > 0.10);
  CHECK_THROWS_AS(calibrate_dephasing(c, 0.9), std::domain_error);
}

TEST_CASE("preparation error rate and sinks") {
  ExperimentConfig c = series_config(1, Variant::single_pi, 100000);
  c.noise.preparation_error = 0.18;
  const auto records = run_fractionated_pi(c);
  const double ok = frequency(records, [](const SeriesRecord& r) { return r.prepared_ok; });
  CHECK(std::abs(ok - 0.82) <= 4 * oracle::binomial_sigma(0.82, c.series));
  // failed preparations into |F=1,m=0> are flipped dark by the pi pulse
  for (const auto& r : records) REQUIRE(r.final_bit == (r.prepared_ok ? 1 : 0));

  c.noise.prep_sink = PrepSink::zeeman;
  for (const auto& r : run_fractionated_pi(c)) REQUIRE(r.final_bit == 1);
}

TEST_CASE("Rabi scan") {
  ExperimentConfig c;
  c.protocol = Protocol::rabi;
  c.detector = DetectorModel::ideal();
  c.pulse = PulseSpec{pi / 25e-4, 0.0, 0.0, 0.0};
  const ScanResult scan = run_rabi_scan(c, 1e-4, 500, 50);
  REQUIRE(scan.bits.size() == 50);
  REQUIRE(scan.times.size() == 500);
  CHECK(scan.bright_fraction()[24] == 1.0);  // Omega * 25 * step = pi
  CHECK(scan.bright_fraction()[49] == 0.0);

  c.scan = ScanSettings{1e-4, 500, 50};
  const CalibrationReport report = cmd_calibrate(CalibrationMode::rabi, c);
  CHECK(report.detected);
  CHECK(std::abs(report.fitted / c.pulse.rabi_frequency - 1.0) < 0.01);

  c.pulse.rabi_frequency = 0.0;
  const ScanResult flat = run_rabi_scan(c, 1e-4, 100, 10);
  for (double f : flat.bright_fraction()) REQUIRE(f == 0.0);
  CHECK_THROWS_AS(cmd_calibrate(CalibrationMode::rabi, c), FitError);
}

TEST_CASE("Ramsey scan") {
  ExperimentConfig c;
  c.protocol = Protocol::ramsey;
  c.detector = DetectorModel::ideal();
  c.pulse = PulseSpec{pi / 2 / 2e-3, 2e-3, 0.0, 0.0};
  c.scan = ScanSettings{1e-3, 60, 50};

  const ScanResult flat = run_ramsey_scan(c, 1e-3, 60, 50);
  for (double f : flat.bright_fraction()) REQUIRE(f == 1.0);
  const CalibrationReport none = cmd_calibrate(CalibrationMode::ramsey, c);
  CHECK_FALSE(none.detected);
  CHECK(none.summary.find("no detectable fringe") != std::string::npos);

  // the drive pulses are short against 1/delta, so the node sits near delta T = pi
  c.pulse = PulseSpec{pi / 2 / 2e-5, 2e-5, 2 * pi * 50.0, 0.0};
  const ScanResult fringe = run_ramsey_scan(c, 1e-3, 60, 50);
  const auto f = fringe.bright_fraction();
  CHECK(f[9] < 0.1);   // gap 10 ms: first dark fringe
  CHECK(f[19] > 0.9);  // gap 20 ms: one full period

  c.scan = ScanSettings{1e-3, 100, 100};
  const CalibrationReport fit = cmd_calibrate(CalibrationMode::ramsey, c);
  CHECK(fit.detected);
  CHECK(std::abs(fit.fitted - 2 * pi * 50.0) < 3 * fit.fit.frequency_sigma);
}

TEST_CASE("Ramsey node from propagator algebra") {
  const double delta = 2 * pi * 50.0;
  const PulseSpec half{pi / 2 / 1e-3, 1e-3, 0.0, 0.0};
  SpinState s = apply_pulse(SpinState{}, half);
  s = free_evolution(s, pi / delta, delta);
  s = apply_pulse(s, half);
  CHECK(s.population(Level::ground) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("config validation") {
  ExperimentConfig c = series_config(3, Variant::single_pi, 10);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.variant = Variant::fractionated_with_probe;
  CHECK_NOTHROW(c.validate());
  c.series = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.series = 1;
  c.fractionation = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
