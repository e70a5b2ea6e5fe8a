#include "lrphase/scenario.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

MoleculeModel::MoleculeModel(std::string name, double mass_kg, double radius_m)
    : name_(std::move(name)), mass_(mass_kg), radius_(radius_m) {
  if (!(std::isfinite(mass_) && mass_ > 0)) throw InvalidArgument(fmt::format("mass must be positive, got {}", mass_));
  if (!(std::isfinite(radius_) && radius_ > 0)) {
    throw InvalidArgument(fmt::format("radius must be positive, got {}", radius_));
  }
}

MoleculeModel c60_model() {
  return MoleculeModel("C60", 60.0 * constants::kCarbon12Mass, constants::kC60Radius);
}

double precession_from_torque(const MoleculeModel& model, double omega0, double torque_J, double theta) {
  if (!(omega0 > 0) || !std::isfinite(omega0)) {
    throw InvalidArgument(fmt::format("omega0 must be positive, got {}", omega0));
  }
  if (!(torque_J >= 0) || !std::isfinite(torque_J)) {
    throw InvalidArgument(fmt::format("torque must be non-negative, got {}", torque_J));
  }
  const double st = std::sin(theta);
  if (!(std::abs(st) > 0)) throw InvalidArgument("sin(theta) = 0: precession rate undefined");
  return torque_J / (model.moment_of_inertia() * omega0 * st);
}

double torque_from_precession(const MoleculeModel& model, double omega0, double Omega, double theta) {
  return omega0 * Omega * model.moment_of_inertia() * std::sin(theta);
}

double free_rotation_correlation_time(const MoleculeModel& model, double temperature_K) {
  if (!(temperature_K > 0) || !std::isfinite(temperature_K)) {
    throw InvalidArgument(fmt::format("temperature must be positive, got {}", temperature_K));
  }
  return 0.6 * std::sqrt(model.moment_of_inertia() / (constants::kBoltzmann * temperature_K));
}

namespace {

RotationRegime make_regime(std::string name, OrientationalPhase phase, double omega0, double temperature) {
  const MoleculeModel c60 = c60_model();
  RotationRegime r;
  r.name = std::move(name);
  r.phase = phase;
  r.omega0 = omega0;
  r.temperature = temperature;
  r.torque_J = kTorqueMidEv * constants::kElectronVolt;
  r.Omega = precession_from_torque(c60, omega0, r.torque_J, r.theta);
  r.Omega_min = precession_from_torque(c60, omega0, kTorqueMinEv * constants::kElectronVolt, r.theta);
  r.Omega_max = precession_from_torque(c60, omega0, kTorqueMaxEv * constants::kElectronVolt, r.theta);
  return r;
}

}  // namespace

std::vector<RotationRegime> regime_presets() {
  return {
      make_regime("disordered", OrientationalPhase::Disordered, 1e11, 283.0),
      make_regime("ordered", OrientationalPhase::Ordered, 1e9, 240.0),
  };
}

RotationRegime find_preset(const std::string& name) {
  std::string known;
  for (const auto& r : regime_presets()) {
    if (r.name == name) return r;
    known += (known.empty() ? "" : ", ") + r.name;
  }
  throw InvalidArgument(fmt::format("unknown scenario '{}'; available: {}", name, known));
}

}  // namespace lrphase
