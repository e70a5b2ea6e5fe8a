#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrphase/config.hpp"
#include "lrphase/errors.hpp"
#include "lrphase/invariant.hpp"
#include "lrphase/parallel.hpp"
#include "lrphase/phase.hpp"

namespace lrphase {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitNumericFailure = 3;
inline constexpr int kExitVerificationFailure = 4;

int exit_code_for(ErrorKind kind);

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;
  nlohmann::json report;
};

/// Invariant pipeline for one config: auxiliary series plus one phase series
/// per configured sigma (same order as cfg.sigma).
struct PipelineRun {
  OmegaTrajectory traj;
  InitialAngles init;
  AuxiliarySeries aux;
  std::vector<PhaseSeries> phases;
};

InitialAngles resolve_initial_angles(const RunConfig& cfg, const OmegaTrajectory& traj);
PipelineRun run_pipeline(const RunConfig& cfg);

/// Writes <prefix>_auxiliary.csv, <prefix>_phases.csv, <prefix>_summary.json
/// and, when levels and a perturbation are configured, <prefix>_lines.{csv,json}.
CommandResult cmd_simulate(const RunConfig& cfg);

/// Compares the assembled particular solutions with the brute-force
/// propagator. Tolerance breaches give kExitVerificationFailure and a report
/// with a step-refinement study.
CommandResult cmd_verify(const RunConfig& cfg);

struct SweepRow {
  std::size_t index = 0;
  double value = 0.0;
  double omega0 = 0.0;
  double Omega = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double period = 0.0;
  double phi_geo_period = 0.0;
  double berry_reference = 0.0;
  double berry_rel_error = 0.0;
  double shift_ev = 0.0;
  double max_lvn_residual = 0.0;
  std::string status = "ok";  // ok | no-solution | singularity | invalid
  std::string message;
};

/// One row per grid value of cfg.sweep, in grid order regardless of execution.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, Execution exec = Execution::Parallel);

/// Writes <prefix>_sweep.csv.
CommandResult cmd_sweep(const RunConfig& cfg, Execution exec = Execution::Parallel);

/// Writes the preset's RunConfig to `out`. Unknown names throw ConfigInvalid
/// listing the presets.
CommandResult cmd_scenario(const std::string& name, const std::filesystem::path& out);

}  // namespace lrphase
