#pragma once

#include <vector>

#include "lrphase/spin_algebra.hpp"
#include "lrphase/trajectory.hpp"

namespace lrphase {

/// Angles of the invariant I(t) = n(lambda, gamma).S at time t.
///
/// lambda_dot and gamma_dot are derivatives of the integrated path (not the
/// right-hand side of the auxiliary equations evaluated at the sample), so
/// lvn_residual() measures how well the sampled path solves those equations.
struct InvariantParams {
  double t = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;  // unwrapped
  double lambda_dot = 0.0;
  double gamma_dot = 0.0;
};

struct InitialAngles {
  double lambda0 = 0.0;
  double gamma0 = 0.0;
};

/// lambda0 = theta(t0), gamma0 = phi(t0): the stationary point of the
/// auxiliary equations for a static field.
InitialAngles default_initial_angles(const OmegaTrajectory& traj, double t0 = 0.0);

struct AuxiliaryOptions {
  double lambda_guard = 1e-6;
  /// Halve the step and rerun while max LvN residual exceeds
  /// residual_tolerance (in units of omega0).
  bool adaptive = false;
  double residual_tolerance = 1e-9;
  int max_halvings = 12;
};

struct AuxiliarySeries {
  std::vector<InvariantParams> samples;
  /// LvN residual per sample, in units of omega0.
  std::vector<double> lvn_residual;
  double step = 0.0;  // signed; equal spacing of samples
  double omega0 = 0.0;
  TrajectoryKind kind = TrajectoryKind::ConstantPrecession;
  double max_lvn_residual = 0.0;
  int halvings = 0;

  double t_start() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }
};

/// Right-hand side of the auxiliary equations:
///   lambda' = w0 sin th sin(ph - g)
///   gamma'  = w0 [cos th - sin th cot lambda cos(ph - g)]
std::pair<double, double> auxiliary_rhs(const OmegaTrajectory& traj, double t, double lambda,
                                        double gamma);

/// Fixed-step classical RK4 from t_start to t_end (either direction). The step
/// is shrunk so that an integer number of steps lands exactly on t_end.
///
/// Throws InvalidArgument for step <= 0 or lambda0 outside the guard band, and
/// SingularityApproach (carrying the failure time) if lambda leaves
/// (guard, pi - guard).
AuxiliarySeries integrate_auxiliary(const OmegaTrajectory& traj, InitialAngles init,
                                    double t_start, double t_end, double step,
                                    const AuxiliaryOptions& options = {});

inline AuxiliarySeries integrate_auxiliary(const OmegaTrajectory& traj, InitialAngles init,
                                           double t_end, double step,
                                           const AuxiliaryOptions& options = {}) {
  return integrate_auxiliary(traj, init, 0.0, t_end, step, options);
}

/// lambda with omega0 sin(lambda - theta) / sin(lambda) = Omega, lambda in (0, pi).
/// Throws NoSolution for theta in {0, pi} with Omega != 0.
double solve_precession_lambda(double omega0, double Omega, double theta);

/// I = (1/2) sin l e^{-ig} S+ + (1/2) sin l e^{ig} S- + cos l S3.
Mat2 invariant_matrix(const InvariantParams& p);

/// V = exp(beta S+ - beta* S-), beta = -(lambda/2) e^{-i gamma}; V^dag I V = S3.
Mat2 transform_V(const InvariantParams& p);

/// || dI/dt + (1/i)[I, H(t)] ||_F with dI/dt built from p's derivatives,
/// divided by omega0 (raw norm when omega0 = 0).
double lvn_residual(const InvariantParams& p, const OmegaTrajectory& traj);

}  // namespace lrphase
