#pragma once

#include <string>
#include <vector>

#include "lrphase/spin_algebra.hpp"
#include "lrphase/trajectory.hpp"

namespace lrphase {

// Brute-force integration of i d/dt psi = (omega(t).S) psi. Independent of the
// invariant pipeline apart from the spin-algebra primitives.

enum class PropagatorMethod {
  ExponentialProduct,  // psi_{n+1} = exp(-i H(t_n + h/2) h) psi_n
  RK4State,            // classical RK4 on the state vector
};

struct PropagatorRun {
  double step = 0.0;  // signed internal step
  PropagatorMethod method = PropagatorMethod::ExponentialProduct;
  std::vector<SpinorState> states;  // recorded every `record_every` steps
  /// max_n || U_n^dag U_n - 1 ||_F of the accumulated propagator.
  double unitarity_defect = 0.0;
  /// max_n | |psi_n| - |psi_0| |; never corrected.
  double norm_drift = 0.0;
  std::vector<std::string> warnings;
};

struct PropagateOptions {
  PropagatorMethod method = PropagatorMethod::ExponentialProduct;
  /// Record one state every this many internal steps.
  int record_every = 1;
};

/// Integrates from psi0.time to t_end. The internal step is shrunk so an
/// integer number of steps (a multiple of record_every) reaches t_end.
/// A warning is attached when omega0 * step >= 0.1.
PropagatorRun propagate(const OmegaTrajectory& traj, const SpinorState& psi0, double t_end,
                        double step, const PropagateOptions& options = {});

struct FidelitySample {
  double t = 0.0;
  double fidelity = 0.0;       // |<psi_oracle|psi_lr>|
  double overlap_phase = 0.0;  // arg <psi_oracle|psi_lr>
};

/// Requires identical sample times (relative 1e-9 of the span).
std::vector<FidelitySample> fidelity(const PropagatorRun& run, const std::vector<SpinorState>& lr_states);

}  // namespace lrphase
