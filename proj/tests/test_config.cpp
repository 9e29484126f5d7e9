#include <cmath>
#include <numbers>

#include "doctest.h"
#include "zeno/config.hpp"

using namespace zeno;
using std::numbers::pi;

namespace {

ConfigError::Kind error_kind(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError for: " << text);
  return ConfigError::Kind::syntax;
}

}  // namespace

TEST_CASE("parse examples") {
  const ExperimentConfig z = parse_config("theta=pi/2, tau=4.9ms");
  CHECK(z.protocol == Protocol::zeno);
  CHECK(z.pulse.duration == doctest::Approx(4.9e-3).epsilon(1e-15));
  CHECK(z.pulse.rabi_frequency == doctest::Approx((pi / 2) / 4.9e-3).epsilon(1e-15));
  CHECK(z.pulse.area() == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(z.probe_duration == doctest::Approx(2e-3));

  const ExperimentConfig f = parse_config("n=9, variant=c, series=222");
  CHECK(f.protocol == Protocol::fractionated);
  CHECK(f.fractionation == 9);
  CHECK(f.variant == Variant::fractionated_with_probe);
  CHECK(f.series == 222);
  CHECK(f.pulse.duration == doctest::Approx(2.9e-3));
  CHECK(f.probe_duration == doctest::Approx(3e-3));
  CHECK(f.pulse.area() == doctest::Approx(pi / 9).epsilon(1e-14));
  CHECK(parse_config("n=9").series == 2000 / 9);
  CHECK(parse_config("n=7, variant=b").series == 285);

  CHECK(error_kind("") == ConfigError::Kind::missing_key);
}

TEST_CASE("units") {
  CHECK(parse_config("theta=pi, tau=4900us").pulse.duration == doctest::Approx(4.9e-3).epsilon(1e-15));
  CHECK(parse_config("theta=pi, tau=0.0049s").pulse.duration == doctest::Approx(4.9e-3).epsilon(1e-15));
  CHECK(parse_config("omega=100Hz").pulse.rabi_frequency == doctest::Approx(2 * pi * 100));
  CHECK(parse_config("omega=0.1kHz").pulse.rabi_frequency == doctest::Approx(2 * pi * 100));
  CHECK(parse_config("omega=640rad/s").pulse.rabi_frequency == 640.0);
  CHECK(parse_config("theta=1.03*pi").pulse.area() == doctest::Approx(1.03 * pi).epsilon(1e-14));
  CHECK(parse_config("theta=2pi-0.1").pulse.area() == doctest::Approx(2 * pi - 0.1).epsilon(1e-14));
  CHECK(parse_config("theta=0.5rad").pulse.area() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(parse_config("theta=pi, dephasing=3.5/s").noise.dephasing_rate == 3.5);
  CHECK(parse_config("theta=pi, dephasing=51/s").noise.dephasing_rate == 51.0);
  CHECK(parse_config("protocol=ramsey, theta=pi/2, detuning=50Hz").pulse.detuning == doctest::Approx(2 * pi * 50));

  CHECK(parse_angle("pi/5") == doctest::Approx(pi / 5));
  CHECK(parse_angle("2*pi") == doctest::Approx(2 * pi));
}

TEST_CASE("errors are named distinctly") {
  using K = ConfigError::Kind;
  CHECK(error_kind("theta=pi, tau=4.9") == K::unit_mismatch);
  CHECK(error_kind("theta=pi, tau=4.9Hz") == K::unit_mismatch);
  CHECK(error_kind("theta=pi, colour=blue") == K::unknown_key);
  CHECK(error_kind("theta=pi, zeeman=1.5") == K::out_of_range);
  CHECK(error_kind("theta=pi, tau=-1ms") == K::out_of_range);
  CHECK(error_kind("n=0") == K::out_of_range);
  CHECK(error_kind("n=3, variant=a") == K::out_of_range);
  CHECK(error_kind("theta=pi, lambda_on=0.1, lambda_off=0.2") == K::out_of_range);
  CHECK(error_kind("theta=pi, omega=3rad/s") == K::conflict);
  CHECK(error_kind("theta=pi, theta=pi/2") == K::conflict);
  CHECK(error_kind("theta=") == K::syntax);
  CHECK(error_kind("theta pi") == K::syntax);
  CHECK(error_kind("protocol=zeno") == K::missing_key);
  CHECK(error_kind("variant=c") == K::missing_key);

  try {
    parse_config("theta=pi, colour=blue");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "colour");
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
}

TEST_CASE("comments and separators") {
  const ExperimentConfig c = parse_config("# Zeno run, small area\ntheta = pi/5   # area, radians\n\nmeasurements=500, seed=7\n");
  CHECK(c.pulse.area() == doctest::Approx(pi / 5));
  CHECK(c.measurements == 500);
  CHECK(c.master_seed == 7);
}

TEST_CASE("overrides replace keys") {
  const ExperimentConfig c = parse_config("n=4, variant=c, seed=1", ConfigOverrides{{"seed", "9"}, {"n", "6"}});
  CHECK(c.master_seed == 9);
  CHECK(c.fractionation == 6);
  CHECK(c.series == 2000 / 6);
  CHECK_THROWS_AS(parse_config("n=4", ConfigOverrides{{"bogus", "1"}}), ConfigError);
}

TEST_CASE("emit and parse round-trip exactly") {
  const char* texts[] = {
      "theta=pi/2",
      "theta=2pi-0.1, tau=4.9ms, probe=1.5ms, lambda_on=7.3, lambda_off=0.215, threshold=3, seed=18446744073709551615",
      "n=9, variant=c, series=222, dephasing=13.37/s, zeeman=0.013, prep_error=0.18, prep_sink=zeeman",
      "n=1, variant=a",
      "n=5, variant=b, phase=0.3, detuning=1.25Hz",
      "protocol=rabi, omega=1256.6370614359173rad/s, scan_step=0.1ms, scan_steps=77, scan_trajectories=3",
      "protocol=ramsey, theta=pi/2, tau=20us, detuning=50Hz",
      "theta=1.03*pi, reprepare=true, measurements=123",
  };
  for (const char* text : texts) {
    const ExperimentConfig c = parse_config(text);
    const std::string emitted = emit_config(c);
    const ExperimentConfig back = parse_config(emitted);
    CHECK(back == c);
    CHECK(emit_config(back) == emitted);
  }

  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    ExperimentConfig c;
    c.pulse = PulseSpec{1e4 * rng.uniform(), 1e-2 * rng.uniform(), 1e3 * (rng.uniform() - 0.5), 6 * rng.uniform()};
    c.probe_duration = 1e-2 * rng.uniform();
    c.detector = DetectorModel{5 + 10 * rng.uniform(), rng.uniform(), 1 + static_cast<std::uint32_t>(rng.next() % 5)};
    c.noise = NoiseParams{100 * rng.uniform(), rng.uniform(), rng.uniform(), PrepSink::zeeman};
    c.measurements = 1 + rng.next() % 100000;
    c.master_seed = rng.next();
    REQUIRE(parse_config(emit_config(c)) == c);
  }
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  for (double v : {pi, 1e-300, 123456.789, 4.9e-3}) CHECK(std::stod(format_double(v)) == v);
}
