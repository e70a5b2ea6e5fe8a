#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lrphase/spin_algebra.hpp"

namespace lrphase {

/// Polar angles of omega(t) and their time derivatives.
struct AngleState {
  double theta = 0.0;
  double phi = 0.0;  // unwrapped
  double theta_dot = 0.0;
  double phi_dot = 0.0;
};

enum class TrajectoryKind { ConstantPrecession, Tabulated, Custom };

/// omega(t) = omega0 (sin th cos ph, sin th sin ph, cos th), constant magnitude.
///
/// Kinds:
///  - ConstantPrecession: th fixed, ph = phi0 + Omega t. Omega = 0 gives a static field.
///  - Tabulated: (t, th, ph) samples, natural cubic splines; derivatives come
///    from the splines.
///  - Custom: user callback for the angles; derivatives either user-supplied or
///    by central differences.
///
/// Immutable after construction; copies share the spline data.
class OmegaTrajectory {
 public:
  using AngleFn = std::function<std::pair<double, double>(double)>;
  using AngleDerivativeFn = std::function<std::pair<double, double>(double)>;

  static OmegaTrajectory constant_precession(double omega0, double Omega, double theta,
                                             double phi0 = 0.0);
  static OmegaTrajectory static_field(double omega0, double theta, double phi);
  /// Validates: >= 3 samples, strictly increasing t, theta in [0, pi], finite
  /// values, |omega| = omega0 within 1e-9 relative.
  static OmegaTrajectory tabulated(double omega0, std::vector<double> t, std::vector<double> theta,
                                   std::vector<double> phi);
  static OmegaTrajectory custom(double omega0, AngleFn angles,
                                AngleDerivativeFn derivatives = nullptr);

  TrajectoryKind kind() const { return kind_; }
  double omega0() const { return omega0_; }
  /// Precession rate and cone angle; only meaningful for ConstantPrecession.
  double precession_rate() const { return Omega_; }
  double cone_angle() const { return theta0_; }
  double phi0() const { return phi0_; }

  /// Time domain over which the trajectory is defined (infinite for closed forms).
  double t_min() const;
  double t_max() const;

  /// Throws OutOfRange outside the tabulated domain.
  AngleState angles(double t) const;
  Vec3 omega_at(double t) const;
  Vec3 omega_dot_at(double t) const;

 private:
  struct Spline;

  OmegaTrajectory() = default;
  void check_domain(double t) const;

  TrajectoryKind kind_ = TrajectoryKind::ConstantPrecession;
  double omega0_ = 0.0;
  double Omega_ = 0.0;
  double theta0_ = 0.0;
  double phi0_ = 0.0;
  std::shared_ptr<const Spline> spline_;
  AngleFn angle_fn_;
  AngleDerivativeFn derivative_fn_;
};

/// B = (omega x omega_dot) / |omega|^2.
struct EffectiveField {
  Vec3 B = Vec3::Zero();
};

EffectiveField effective_field(const OmegaTrajectory& traj, double t);

/// Reads "t,theta,phi" CSV (header required, SI units, '#' comment lines skipped).
OmegaTrajectory load_tabulated_csv(const std::filesystem::path& path, double omega0);

}  // namespace lrphase
