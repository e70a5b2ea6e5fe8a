#pragma once

#include <span>
#include <vector>

#include "lrphase/invariant.hpp"
#include "lrphase/spin_algebra.hpp"
#include "lrphase/trajectory.hpp"

namespace lrphase {

/// Phases accumulated by the particular solution for projection sigma at t.
struct PhaseRecord {
  SpinProjection sigma = SpinProjection::up();
  double t = 0.0;
  double phi_dyn = 0.0;
  double phi_geo = 0.0;

  double phi_total() const { return phi_dyn + phi_geo; }
};

struct PhaseSeries {
  SpinProjection sigma = SpinProjection::up();
  std::vector<PhaseRecord> records;
  /// |Simpson - trapezoid| at the final sample, a Richardson-style error bar.
  double dyn_error_estimate = 0.0;
  double geo_error_estimate = 0.0;

  const PhaseRecord& final() const { return records.back(); }
};

/// Running integral of equally spaced samples: composite Simpson on even
/// prefixes, with a one-interval quadratic correction on odd ones. Falls back
/// to the trapezoid rule for two samples.
std::vector<double> cumulative_simpson(std::span<const double> f, double h);
std::vector<double> cumulative_trapezoid(std::span<const double> f, double h);

/// sigma * int_0^t w0 [cos l cos th + sin l sin th cos(g - ph)] dt'.
/// Throws InvalidArgument if the series was produced for another trajectory.
std::vector<double> dynamical_phase(const AuxiliarySeries& series, const OmegaTrajectory& traj,
                                    SpinProjection sigma);

/// sigma * int_0^t g' (1 - cos l) dt'. Depends only on the (lambda, gamma) history.
std::vector<double> geometric_phase(const AuxiliarySeries& series, SpinProjection sigma);

PhaseSeries accumulate_phases(const AuxiliarySeries& series, const OmegaTrajectory& traj,
                              SpinProjection sigma);

/// Adiabatic cyclic reference 2 pi sigma (1 - cos theta).
double berry_limit_check(double theta, SpinProjection sigma);

/// e^{-i (phi_dyn + phi_geo)} V(t) |sigma>.
SpinorState assemble_state(const InvariantParams& p, const PhaseRecord& phases);

std::vector<SpinorState> assemble_states(const AuxiliarySeries& series, const PhaseSeries& phases);

}  // namespace lrphase
