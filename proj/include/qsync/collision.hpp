#pragma once

// Collision models of two system qubits s1, s2 and a stream of fresh
// environment qubits. Register ordering within a cycle is (s1, s2, e) with
// the environment as the rightmost tensor factor; it is traced out at the
// end of every cycle and never reused.

#include "qsync/common.hpp"
#include "qsync/dynamics.hpp"
#include "qsync/qdyn.hpp"

namespace qsync::collision {

/// Physical parameters of one collision-model run (hbar = 1).
struct CollisionConfig {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double j = 0.1;       // system-environment coupling
  double lam = 0.03;    // qubit-qubit coupling
  double dt_s = 1.0;    // free evolution
  double dt_ss = 1.0;   // qubit-qubit collision
  double dt_se = 1.0;   // system-environment collision
  int n_collisions = 4000;
  double env_p = 0.0;   // environment excited-state probability

  /// Throws std::invalid_argument on negative omega2, non-finite values, non-positive durations,
  /// negative n_collisions or env_p outside [0, 0.5].
  void validate() const;
};

using LcmConfig = CollisionConfig;
using GcmConfig = CollisionConfig;

/// diag(1 - p, p).
qdyn::DensityMatrix env_state(double p);

/// p|a b><a b| + (1-p) [split |a b'><a b'| + (1-split) |a' b><a' b|] where
/// x' = sigma^z x is the phase-flipped preparation of x.
qdyn::DensityMatrix error_mixture(const qdyn::ComplexVector& a, const qdyn::ComplexVector& b, double p,
                                  double split = 0.5);

/// Initialization-error state around |++>: p|++><++| + (1-p)/2 (|+-><+-| + |-+><-+|)
/// for the default even split.
qdyn::DensityMatrix initial_state(double p, double split = 0.5);

qdyn::ComplexVector plus_state();

/// Full-cycle unitary on (s1, s2, e), steps composed in caption order.
qdyn::UnitaryMatrix lcm_cycle_unitary(const CollisionConfig& cfg);
qdyn::UnitaryMatrix gcm_cycle_unitary(const CollisionConfig& cfg);

/// One literal cycle: couple to a fresh environment qubit, apply each
/// interaction step in order, trace the environment out.
qdyn::DensityMatrix lcm_cycle(const qdyn::DensityMatrix& rho_s, const CollisionConfig& cfg);
qdyn::DensityMatrix gcm_cycle(const qdyn::DensityMatrix& rho_s, const CollisionConfig& cfg);

/// The cycle as a linear map on vec(rho_s), built from the Kraus operators
/// <a|_e U |b>_e sqrt(p_b) of the full-cycle unitary.
dyn::StepMap cycle_map(Model model, const CollisionConfig& cfg);

/// (<sigma^x_s1>, <sigma^x_s2>) after each of cfg.n_collisions cycles,
/// indexed 1..n_collisions.
Trajectory simulate_collisions(Model model, const CollisionConfig& cfg, const qdyn::DensityMatrix& rho0);

}  // namespace qsync::collision
