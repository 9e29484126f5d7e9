// Internal state of the ion over the four hyperfine ground levels, and its
// evolution under microwave pulses, free precession and phase damping.
//
// Two engines share one set of conventions:
//   * SpinState    -- pure state, evolved stochastically (Monte-Carlo unit);
//   * DensityMatrix -- mixed state, evolved deterministically (exact oracle).
//
// Basis order: |F=0,m=0>, |F=1,m=-1>, |F=1,m=0>, |F=1,m=+1>.  The microwave
// couples only |F=0,m=0> ("|0>") and |F=1,m=0> ("|1>").
#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "zeno/rng.hpp"

namespace zeno {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

enum class Level : int { ground = 0, minus = 1, upper = 2, plus = 3 };

constexpr int index_of(Level level) noexcept { return static_cast<int>(level); }

/// One microwave pulse in the rotating frame.
struct PulseSpec {
  double rabi_frequency = 0.0;  ///< Omega, rad/s
  double duration = 0.0;        ///< tau, s
  double detuning = 0.0;        ///< delta, rad/s
  double phase = 0.0;           ///< phi, rad; phi = 0 drives a sigma_x rotation

  /// Pulse area theta = Omega * tau.
  [[nodiscard]] double area() const noexcept { return rabi_frequency * duration; }

  /// Throws std::invalid_argument unless tau >= 0 and Omega >= 0.
  void validate() const;

  bool operator==(const PulseSpec&) const = default;
};

/// Where a failed |0> preparation leaves the ion.
enum class PrepSink {
  upper,   ///< |F=1,m=0>, still driven by the microwave
  zeeman,  ///< |F=1,m=+-1> (50/50), bright and decoupled from the drive
};

struct NoiseParams {
  double dephasing_rate = 0.0;     ///< gamma_phi, 1/s, damping of the 0<->1 coherence
  double zeeman_pump_prob = 0.0;   ///< per bright probe, |F=1,m=0> -> |F=1,m=+-1>
  double preparation_error = 0.0;  ///< probability a |0> preparation leaves the ion bright
  PrepSink prep_sink = PrepSink::upper;

  void validate() const;

  bool operator==(const NoiseParams&) const = default;
};

class SpinState {
public:
  /// The prepared dark state |F=0,m=0>.
  SpinState() { amplitudes_[0] = 1.0; }

  /// Normalizes `amplitudes`; throws std::invalid_argument for a zero vector.
  explicit SpinState(const Vector4c& amplitudes);

  static SpinState basis(Level level);

  [[nodiscard]] const Vector4c& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] Complex amplitude(Level level) const { return amplitudes_[index_of(level)]; }
  [[nodiscard]] double population(Level level) const { return std::norm(amplitude(level)); }

  /// Total F=1 population.
  [[nodiscard]] double bright_population() const;
  [[nodiscard]] double norm() const { return amplitudes_.norm(); }

  /// Unchecked construction for amplitudes already normalized by a unitary map.
  static SpinState from_normalized(const Vector4c& amplitudes);

private:
  Vector4c amplitudes_ = Vector4c::Zero();
};

class DensityMatrix {
public:
  DensityMatrix() : DensityMatrix(SpinState{}) {}
  explicit DensityMatrix(const SpinState& pure);

  /// Takes ownership of `entries`; throws std::invalid_argument unless the
  /// matrix is Hermitian, unit-trace and positive semidefinite.
  explicit DensityMatrix(const Matrix4c& entries);

  /// Equal mixture of |0> and |1>.
  static DensityMatrix mixed_drive_subspace();

  [[nodiscard]] const Matrix4c& entries() const noexcept { return rho_; }
  [[nodiscard]] double population(Level level) const { return rho_(index_of(level), index_of(level)).real(); }
  [[nodiscard]] std::array<double, 4> populations() const;
  [[nodiscard]] Complex coherence(Level row, Level col) const { return rho_(index_of(row), index_of(col)); }
  [[nodiscard]] double trace() const { return rho_.trace().real(); }
  [[nodiscard]] double min_eigenvalue() const;

  /// Hermitian and unit trace within `tol`, min eigenvalue >= -1e-10.
  [[nodiscard]] bool is_physical(double tol = 1e-12) const;

  /// Unchecked construction for channel implementations.
  static DensityMatrix from_trusted(const Matrix4c& entries);

private:
  Matrix4c rho_;
};

/// exp(-i H tau) on (|0>, |1>) for
/// H = (delta/2) sigma_z + (Omega/2)(cos(phi) sigma_x + sin(phi) sigma_y),
/// with sigma_z = |1><1| - |0><0|.
Matrix2c pulse_propagator(const PulseSpec& pulse);

/// Embeds a drive-subspace operator into the four-level space (identity on m=+-1).
Matrix4c embed_drive(const Matrix2c& op);

SpinState apply_pulse(const SpinState& state, const PulseSpec& pulse);

/// Undriven precession for `gap` seconds at detuning `detuning`; |1> gains
/// phase exp(-i delta gap) relative to |0>.  Same frame as pulse_propagator.
SpinState free_evolution(const SpinState& state, double gap, double detuning);

/// Phase-flip unraveling of pure dephasing over `duration` seconds.
SpinState apply_dephasing(const SpinState& state, double duration, const NoiseParams& params,
                          Rng& rng);

/// Probability of a phase-flip kick over `duration`: (1 - exp(-gamma t)) / 2.
double phase_flip_probability(double duration, const NoiseParams& params);

/// Pulse followed by the dephasing accrued over its duration.  Stochastic
/// counterpart of evolve_density.
SpinState drive_pulse(const SpinState& state, const PulseSpec& pulse, const NoiseParams& params,
                      Rng& rng);

/// Unitary pulse on the m=0 block, then exp(-gamma tau) damping of every
/// coherence with |1>.
DensityMatrix evolve_density(const DensityMatrix& rho, const PulseSpec& pulse,
                             const NoiseParams& params);

DensityMatrix free_evolution(const DensityMatrix& rho, double gap, double detuning);

/// Deterministic phase damping over `duration` seconds.
DensityMatrix dephase(const DensityMatrix& rho, double duration, const NoiseParams& params);

}  // namespace zeno
