// Reference computations written independently of the library code.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Mat2 = std::array<std::array<C, 2>, 2>;

/// Propagator of i d/dt psi = H psi, H = (delta/2) sz + (Omega/2)(cos phi sx + sin phi sy),
/// by fixed-step RK4.  |1> is the +1 eigenstate of every Pauli convention
/// here, so in (|0>, |1>) order sz = diag(-1, 1) and <0|sy|1> = +i.
inline Mat2 integrate_two_level(double omega, double delta, double phi, double t, int steps = 20000) {
  const C i{0.0, 1.0};
  const C h00 = -delta / 2, h11 = delta / 2;
  const C h01 = omega / 2 * std::polar(1.0, phi);
  const C h10 = std::conj(h01);
  auto deriv = [&](const std::array<C, 2>& y) {
    return std::array<C, 2>{-i * (h00 * y[0] + h01 * y[1]), -i * (h10 * y[0] + h11 * y[1])};
  };
  Mat2 u{};
  const double dt = t / steps;
  for (int col = 0; col < 2; ++col) {
    std::array<C, 2> y{col == 0 ? C{1} : C{0}, col == 1 ? C{1} : C{0}};
    for (int s = 0; s < steps; ++s) {
      const auto k1 = deriv(y);
      const auto k2 = deriv({y[0] + dt / 2 * k1[0], y[1] + dt / 2 * k1[1]});
      const auto k3 = deriv({y[0] + dt / 2 * k2[0], y[1] + dt / 2 * k2[1]});
      const auto k4 = deriv({y[0] + dt * k3[0], y[1] + dt * k3[1]});
      for (int r = 0; r < 2; ++r) y[r] += dt / 6 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
    }
    u[0][col] = y[0];
    u[1][col] = y[1];
  }
  return u;
}

/// P(N >= k) for N ~ Poisson(mean), summing the pmf from log-gamma.
inline double poisson_upper_tail(double mean, int k) {
  if (mean == 0.0) return k <= 0 ? 1.0 : 0.0;
  double below = 0.0;
  for (int j = 0; j < k; ++j) below += std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
  return 1.0 - below;
}

struct SeriesLaw {
  double all_off = 0.0;    ///< every probe dark
  double first_off = 0.0;  ///< the n-1 intermediate probes dark, final anything
  double final_off = 0.0;  ///< final probe dark, intermediates anything
};

/// Ideal fractionated series of n pulses of area pi/n, enumerating all 2^n
/// outcome strings of selective probing (a collapsed basis state stays with
/// probability cos^2(pi/2n)).
inline SeriesLaw enumerate_series(unsigned n) {
  const double stay = std::pow(std::cos(std::numbers::pi / (2.0 * n)), 2);
  SeriesLaw law;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double prob = 1.0;
    int state = 0;
    for (unsigned k = 0; k < n; ++k) {
      const int bit = (mask >> k) & 1u;
      prob *= bit == state ? stay : 1.0 - stay;
      state = bit;
    }
    const bool final_dark = ((mask >> (n - 1)) & 1u) == 0;
    const bool intermediates_dark = (mask & ((1u << (n - 1)) - 1u)) == 0;
    if (final_dark) law.final_off += prob;
    if (intermediates_dark) law.first_off += prob;
    if (final_dark && intermediates_dark) law.all_off += prob;
  }
  return law;
}

inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
