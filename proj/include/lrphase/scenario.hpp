#pragma once

#include <string>
#include <vector>

namespace lrphase {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;          // J/K
inline constexpr double kElectronVolt = 1.602176634e-19;    // J
inline constexpr double kCarbon12Mass = 1.99264688e-26;     // kg
inline constexpr double kC60Radius = 3.55e-10;              // m
}  // namespace constants

/// Rigid spherical-shell rotor, I = (2/3) m a^2.
class MoleculeModel {
 public:
  /// Throws InvalidArgument unless mass and radius are finite and positive.
  MoleculeModel(std::string name, double mass_kg, double radius_m);

  const std::string& name() const { return name_; }
  double mass() const { return mass_; }
  double radius() const { return radius_; }
  double moment_of_inertia() const { return 2.0 / 3.0 * mass_ * radius_ * radius_; }

 private:
  std::string name_;
  double mass_;
  double radius_;
};

/// 60 carbon-12 atoms on a 3.55 Angstrom shell; I ~ 1.0045e-43 kg m^2.
MoleculeModel c60_model();

/// Omega = |M| / (I w0 sin th), inverting |M| = w0 Omega I sin th.
double precession_from_torque(const MoleculeModel& model, double omega0, double torque_J,
                              double theta = 1.5707963267948966);
double torque_from_precession(const MoleculeModel& model, double omega0, double Omega,
                              double theta = 1.5707963267948966);

/// tau = (3/5) sqrt(I / (k_B T)).
double free_rotation_correlation_time(const MoleculeModel& model, double temperature_K);

enum class OrientationalPhase { Ordered, Disordered };

struct RotationRegime {
  std::string name;
  OrientationalPhase phase = OrientationalPhase::Disordered;
  double omega0 = 0.0;       // rad/s
  double Omega = 0.0;        // rad/s, from the midpoint torque
  double Omega_min = 0.0;    // rad/s, torque window lower end
  double Omega_max = 0.0;    // rad/s, torque window upper end
  double temperature = 0.0;  // K
  double torque_J = 0.0;     // midpoint |M|
  double theta = 1.5707963267948966;
};

/// Van der Waals window for |M|: 0.001 .. 0.1 eV, midpoint 0.01 eV.
inline constexpr double kTorqueMinEv = 0.001;
inline constexpr double kTorqueMidEv = 0.01;
inline constexpr double kTorqueMaxEv = 0.1;

/// "disordered" (w0 = 1e11 rad/s, 283 K) and "ordered" (w0 = 1e9 rad/s, 240 K).
std::vector<RotationRegime> regime_presets();

/// Throws InvalidArgument listing the known names.
RotationRegime find_preset(const std::string& name);

}  // namespace lrphase
