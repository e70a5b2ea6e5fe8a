#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrphase/scenario.hpp"
#include "lrphase/spectroscopy.hpp"
#include "lrphase/trajectory.hpp"

namespace lrphase {

inline constexpr int kSchemaVersion = 1;

struct TrajectoryConfig {
  std::string kind = "constant_precession";  // constant_precession | static | tabulated
  double omega0 = 1.0;
  double Omega = 0.0;
  double theta = 0.0;
  double phi0 = 0.0;
  std::string csv;  // tabulated only, relative to the config file
};

struct InitialConfig {
  std::string mode = "default";  // default | precession | explicit
  double lambda0 = 0.0;
  double gamma0 = 0.0;
};

struct IntegratorConfig {
  double step = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  bool adaptive = false;
  double lambda_guard = 1e-6;
  double residual_tolerance = 1e-9;
};

struct OracleConfig {
  bool enabled = false;
  std::string method = "exponential_product";  // exponential_product | rk4
  int substeps = 1;
  double min_fidelity = 1.0 - 1e-8;
  double max_phase_error = 1e-6;
};

struct OutputConfig {
  std::string dir = ".";
  std::string prefix = "run";
};

struct SweepConfig {
  std::string parameter = "Omega_ratio";  // Omega_ratio | Omega | theta | omega0
  std::vector<double> values;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::optional<std::string> scenario;
  TrajectoryConfig trajectory;
  InitialConfig initial;
  std::vector<SpinProjection> sigma{SpinProjection::up(), SpinProjection::down()};
  IntegratorConfig integrator;
  OracleConfig oracle;
  OutputConfig output;
  std::vector<EnergyLevel> levels;
  std::optional<PerturbationModel> perturbation;
  std::optional<RotationParams> rotation;
  std::optional<SweepConfig> sweep;

  /// Directory relative paths resolve against; not serialized.
  std::filesystem::path base_dir = ".";
};

/// Schema-validates j (unknown keys rejected). Throws ConfigInvalid.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

/// Reads and parses a JSON config; `overrides` are "dotted.key=value" strings
/// applied before validation (value parsed as JSON, else taken as a string).
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

void apply_override(nlohmann::json& j, const std::string& assignment);

nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a 64 of the canonical serialization without the output section, as
/// 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Ready-to-run config for a C60 rotation regime.
RunConfig config_for_regime(const RotationRegime& regime);

OmegaTrajectory build_trajectory(const RunConfig& cfg);

}  // namespace lrphase
