#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrphase/invariant.hpp"
#include "lrphase/parallel.hpp"
#include "lrphase/phase.hpp"
#include "lrphase/spin_algebra.hpp"

namespace lrphase {

/// Reduced Planck constant in eV s (CODATA 2018, exact to the digits given).
inline constexpr double kHbarEvSeconds = 6.582119569e-16;

inline double ev_to_angular(double ev) { return ev / kHbarEvSeconds; }
inline double angular_to_ev(double w) { return w * kHbarEvSeconds; }

/// Orbital index n together with the spin projection.
struct StateLabel {
  int n = 0;
  SpinProjection sigma = SpinProjection::up();

  bool operator==(const StateLabel&) const = default;
};

/// Order: by n, then sigma = +1/2 before -1/2.
bool operator<(const StateLabel& a, const StateLabel& b);

struct EnergyLevel {
  StateLabel label;
  double epsilon_ev = 0.0;
};

/// Throws InvalidArgument for duplicate labels or non-finite energies.
void validate_levels(std::span<const EnergyLevel> levels);
double level_energy_ev(std::span<const EnergyLevel> levels, StateLabel label);

enum class TimeProfile { Constant, MonochromaticDrive };

/// Basis the matrix elements are expressed in.
///  Lab: <phi_m s'|H'|phi_n s> in the fixed S3 basis; dressed with V(t) on use.
///  Invariant: elements already equal <phi_m s'|V^dag H' V|phi_n s>.
enum class PerturbationFrame { Lab, Invariant };

struct MatrixElement {
  StateLabel to;
  StateLabel from;
  Complex value_ev;
};

/// H'(t) = W f(t) with f = 1 (Constant) or cos(nu t) (MonochromaticDrive).
/// Elements whose Hermitian partner is omitted are implied by conjugation.
class PerturbationModel {
 public:
  PerturbationModel() = default;
  /// Throws InvalidArgument if an element and its partner are not conjugate.
  PerturbationModel(std::vector<MatrixElement> elements, TimeProfile profile,
                    double drive_frequency = 0.0, PerturbationFrame frame = PerturbationFrame::Lab);

  Complex element_ev(StateLabel to, StateLabel from) const;
  double profile(double t) const;

  TimeProfile time_profile() const { return profile_; }
  double drive_frequency() const { return drive_frequency_; }
  PerturbationFrame frame() const { return frame_; }
  const std::vector<MatrixElement>& elements() const { return elements_; }

  PerturbationModel with_drive_frequency(double nu) const;

  /// <phi_to|V^dag H' V|phi_from> in eV for the given V (time profile excluded).
  /// Invariant-frame elements are returned as stored.
  Complex dressed_element_ev(StateLabel to, StateLabel from, const Mat2& V) const;

 private:
  std::vector<MatrixElement> elements_;
  TimeProfile profile_ = TimeProfile::Constant;
  double drive_frequency_ = 0.0;
  PerturbationFrame frame_ = PerturbationFrame::Lab;
};

/// phi_tot(to, from; t) = [phi_sigma(t) + eps_from t] - [phi_sigma'(t) + eps_to t], radians.
/// from_phases must carry from.sigma and to_phases to.sigma, both at time t.
double total_phase(StateLabel to, StateLabel from, const PhaseRecord& from_phases,
                   const PhaseRecord& to_phases, std::span<const EnergyLevel> levels, double t);

/// (sigma - sigma') [w0 cos(l - th) + Omega (1 - cos l)] in rad/s, lambda from
/// solve_precession_lambda.
double spectral_shift_rate(SpinProjection sigma, SpinProjection sigma_p, double omega0,
                           double Omega, double theta);
/// Same, in eV.
double spectral_shift(SpinProjection sigma, SpinProjection sigma_p, double omega0, double Omega,
                      double theta);

/// Everything the first-order amplitude needs from an invariant run.
struct TransitionContext {
  const AuxiliarySeries* aux = nullptr;
  const PhaseSeries* phases_up = nullptr;
  const PhaseSeries* phases_down = nullptr;

  const PhaseSeries& phases(SpinProjection s) const { return s == SpinProjection::up() ? *phases_up : *phases_down; }
};

struct AmplitudeResult {
  Complex amplitude;
  double probability = 0.0;
  double max_abs_amplitude = 0.0;
  bool first_order_valid = true;  // max |a| <= 0.1
};

/// a(t_end) = (1/i) int H'_{to,from}(t) exp[(1/i) phi_tot(t)] dt on the
/// auxiliary grid, Simpson quadrature. H' in rad/s (eV / hbar).
AmplitudeResult transition_amplitude(const PerturbationModel& pert, std::span<const EnergyLevel> levels,
                                     StateLabel from, StateLabel to, const TransitionContext& ctx);

struct ScanPoint {
  double drive_frequency = 0.0;
  double probability = 0.0;
};

/// |a|^2 at each drive frequency (pert must be MonochromaticDrive).
std::vector<ScanPoint> detuning_scan(const PerturbationModel& pert, std::span<const EnergyLevel> levels,
                                     StateLabel from, StateLabel to, const TransitionContext& ctx,
                                     std::span<const double> frequencies,
                                     Execution exec = Execution::Parallel);

/// Maximum of the scan refined by a parabola through the top three points.
double locate_peak(std::span<const ScanPoint> scan);

struct RotationParams {
  double omega0 = 0.0;
  double Omega = 0.0;
  double theta = 0.0;
};

struct SpectralLine {
  StateLabel from;
  StateLabel to;
  double bare_gap_ev = 0.0;  // eps_from - eps_to
  double shift_ev = 0.0;
  double shifted_position_ev = 0.0;
  Complex coupling_ev;
};

/// One line per unordered pair of distinct states with a nonzero coupling;
/// `from` is the lower state in StateLabel order. Sorted by shifted position.
std::vector<SpectralLine> line_table(std::span<const EnergyLevel> levels, const PerturbationModel& pert,
                                     const RotationParams& rotation);

}  // namespace lrphase
