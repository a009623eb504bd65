#pragma once

// Collective-decay master equation for two emitters:
//   d rho/dt = -i[H_s + H_d, rho] + D_-(rho) + D_+(rho)
// with H_s = sum_i omega_i sigma^z_i, H_d = f12 (s+_1 s-_2 + s+_2 s-_1),
// gamma_ii = omega_i^3 g, gamma_12 = gamma_21 = sqrt(gamma_1 gamma_2) a12.

#include "qsync/dynamics.hpp"
#include "qsync/qdyn.hpp"

namespace qsync::lindblad {

struct MeConfig {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double f12 = 0.0;
  double g = 0.2;
  double a12 = 1.0;
  double n_bar = 0.0;
  double t_max = 500.0;
  double sample_dt = 1.0;

  /// Throws std::invalid_argument on a12 outside [0, 1], n_bar < 0, g <= 0,
  /// t_max <= 0, or t_max not an integer multiple of sample_dt.
  void validate() const;

  /// Number of propagation steps between t = 0 and t_max.
  std::size_t n_steps() const;
};

/// Generator acting on the column-stacked density matrix.
class Superoperator {
 public:
  explicit Superoperator(const dyn::Mat16& m) : m_(m) {}

  const dyn::Mat16& matrix() const noexcept { return m_; }

  /// L(rho) as a 4x4 matrix (traceless, generally not a state).
  qdyn::ComplexMatrix apply(const qdyn::ComplexMatrix& rho) const;

 private:
  dyn::Mat16 m_;
};

Superoperator liouvillian(const MeConfig& cfg);

/// exp(L dt) built as exp(L dt / substeps)^substeps.
dyn::StepMap propagator(const Superoperator& l, double dt, int substeps = 1);

/// |+> (x) (|0> + e^{-i pi/3}|1>)/sqrt(2).
qdyn::ComplexVector ideal_qubit1();
qdyn::ComplexVector ideal_qubit2();
qdyn::DensityMatrix ideal_initial_state();

/// Samples at t = 0, sample_dt, ..., t_max. Throws NumericalError if the
/// trace drifts by more than 1e-8.
Trajectory propagate(const qdyn::DensityMatrix& rho0, const MeConfig& cfg);

}  // namespace qsync::lindblad
