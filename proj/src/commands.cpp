#include "lrphase/commands.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "lrphase/csv.hpp"
#include "lrphase/oracle.hpp"
#include "lrphase/scenario.hpp"
#include "lrphase/spectroscopy.hpp"

namespace lrphase {

using nlohmann::json;

namespace {

std::filesystem::path output_path(const RunConfig& cfg, const std::string& suffix) {
  std::filesystem::path dir(cfg.output.dir);
  if (dir.is_relative()) dir = std::filesystem::current_path() / dir;
  std::filesystem::create_directories(dir);
  return dir / (cfg.output.prefix + suffix);
}

const char* sigma_tag(SpinProjection s) { return s == SpinProjection::up() ? "up" : "down"; }

AuxiliaryOptions aux_options(const RunConfig& cfg) {
  AuxiliaryOptions o;
  o.lambda_guard = cfg.integrator.lambda_guard;
  o.adaptive = cfg.integrator.adaptive;
  o.residual_tolerance = cfg.integrator.residual_tolerance;
  return o;
}

bool closed_form_precession(const RunConfig& cfg) {
  return cfg.trajectory.kind != "tabulated";
}

std::optional<RotationParams> rotation_for(const RunConfig& cfg) {
  if (cfg.rotation) return cfg.rotation;
  if (closed_form_precession(cfg)) {
    return RotationParams{cfg.trajectory.omega0, cfg.trajectory.Omega, cfg.trajectory.theta};
  }
  return std::nullopt;
}

const PhaseSeries* find_phases(const PipelineRun& run, SpinProjection s) {
  for (const auto& p : run.phases) {
    if (p.sigma == s) return &p;
  }
  return nullptr;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::InvalidArgument:
    case ErrorKind::OutOfRange:
      return kExitConfigInvalid;
    case ErrorKind::NoSolution:
    case ErrorKind::SingularityApproach:
    case ErrorKind::NumericDerivativeFailure:
      return kExitNumericFailure;
    case ErrorKind::VerificationFailure:
      return kExitVerificationFailure;
  }
  return kExitFailure;
}

InitialAngles resolve_initial_angles(const RunConfig& cfg, const OmegaTrajectory& traj) {
  const double t0 = cfg.integrator.t_start;
  if (cfg.initial.mode == "explicit") return {cfg.initial.lambda0, cfg.initial.gamma0};
  if (cfg.initial.mode == "precession") {
    const auto& tc = cfg.trajectory;
    const double lambda = solve_precession_lambda(tc.omega0, tc.Omega, tc.theta);
    return {lambda, traj.angles(t0).phi};
  }
  return default_initial_angles(traj, t0);
}

PipelineRun run_pipeline(const RunConfig& cfg) {
  PipelineRun run{build_trajectory(cfg), {}, {}, {}};
  run.init = resolve_initial_angles(cfg, run.traj);
  run.aux = integrate_auxiliary(run.traj, run.init, cfg.integrator.t_start, cfg.integrator.t_end,
                                cfg.integrator.step, aux_options(cfg));
  for (auto s : cfg.sigma) run.phases.push_back(accumulate_phases(run.aux, run.traj, s));
  return run;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const PipelineRun run = run_pipeline(cfg);
  CommandResult result;

  {
    const auto path = output_path(cfg, "_auxiliary.csv");
    CsvWriter csv(path, hash, {"t", "lambda", "gamma", "lambda_dot", "gamma_dot", "lvn_residual"});
    for (std::size_t i = 0; i < run.aux.samples.size(); ++i) {
      const auto& p = run.aux.samples[i];
      csv.row({p.t, p.lambda, p.gamma, p.lambda_dot, p.gamma_dot, run.aux.lvn_residual[i]});
    }
    result.artifacts.push_back(path);
  }
  {
    const auto path = output_path(cfg, "_phases.csv");
    CsvWriter csv(path, hash, {"t", "sigma", "phi_dyn", "phi_geo", "phi_total"});
    for (std::size_t i = 0; i < run.aux.samples.size(); ++i) {
      for (const auto& ps : run.phases) {
        const auto& r = ps.records[i];
        csv.row({r.t, r.sigma.value(), r.phi_dyn, r.phi_geo, r.phi_total()});
      }
    }
    result.artifacts.push_back(path);
  }

  const double duration = cfg.integrator.t_end - cfg.integrator.t_start;
  json summary;
  summary["command"] = "simulate";
  summary["config_hash"] = hash;
  summary["trajectory"] = cfg.trajectory.kind;
  summary["omega0"] = cfg.trajectory.omega0;
  summary["lambda0"] = run.init.lambda0;
  summary["gamma0"] = run.init.gamma0;
  summary["t_start"] = cfg.integrator.t_start;
  summary["t_end"] = cfg.integrator.t_end;
  summary["step"] = run.aux.step;
  summary["samples"] = run.aux.samples.size();
  summary["max_lvn_residual"] = run.aux.max_lvn_residual;
  summary["step_halvings"] = run.aux.halvings;
  json warnings = json::array();
  if (run.aux.max_lvn_residual > cfg.integrator.residual_tolerance) {
    warnings.push_back(fmt::format("max LvN residual {} exceeds tolerance {}", run.aux.max_lvn_residual,
                                   cfg.integrator.residual_tolerance));
  }

  json phases = json::array();
  for (const auto& ps : run.phases) {
    const auto& f = ps.final();
    json p{{"sigma", ps.sigma.value()},
           {"phi_dyn", f.phi_dyn},
           {"phi_geo", f.phi_geo},
           {"phi_total", f.phi_total()},
           {"dyn_error_estimate", ps.dyn_error_estimate},
           {"geo_error_estimate", ps.geo_error_estimate}};
    if (duration != 0.0) {
      p["phi_dyn_rate"] = f.phi_dyn / duration;
      p["phi_geo_rate"] = f.phi_geo / duration;
    }
    phases.push_back(p);
  }
  summary["phases"] = phases;

  if (closed_form_precession(cfg) && cfg.initial.mode == "precession") {
    const auto& tc = cfg.trajectory;
    const double lambda = run.init.lambda0;
    json analytic{{"lambda", lambda}, {"Omega", tc.Omega}, {"theta", tc.theta}};
    json rates = json::array();
    for (auto s : cfg.sigma) {
      rates.push_back({{"sigma", s.value()},
                       {"phi_dyn_rate", tc.omega0 * s.value() * std::cos(lambda - tc.theta)},
                       {"phi_geo_rate", tc.Omega * s.value() * (1.0 - std::cos(lambda))},
                       {"berry_reference", berry_limit_check(tc.theta, s)}});
    }
    analytic["rates"] = rates;
    analytic["spectral_shift_ev"] =
        spectral_shift(SpinProjection::up(), SpinProjection::down(), tc.omega0, tc.Omega, tc.theta);
    summary["analytic"] = analytic;
  }

  if (!cfg.levels.empty() && cfg.perturbation) {
    if (const auto rot = rotation_for(cfg)) {
      const auto lines = line_table(cfg.levels, *cfg.perturbation, *rot);
      const PhaseSeries* up = find_phases(run, SpinProjection::up());
      const PhaseSeries* down = find_phases(run, SpinProjection::down());
      const TransitionContext ctx{&run.aux, up, down};

      const auto csv_path = output_path(cfg, "_lines.csv");
      CsvWriter csv(csv_path, hash,
                    {"from_n", "from_sigma", "to_n", "to_sigma", "bare_gap_ev", "shift_ev",
                     "shifted_position_ev", "coupling_re_ev", "coupling_im_ev"});
      json jl = json::array();
      for (const auto& l : lines) {
        csv.row({l.from.n, l.from.sigma.value(), l.to.n, l.to.sigma.value(), l.bare_gap_ev, l.shift_ev,
                 l.shifted_position_ev, l.coupling_ev.real(), l.coupling_ev.imag()});
        json e{{"from", {l.from.n, l.from.sigma.value()}},
               {"to", {l.to.n, l.to.sigma.value()}},
               {"bare_gap_ev", l.bare_gap_ev},
               {"shift_ev", l.shift_ev},
               {"shifted_position_ev", l.shifted_position_ev},
               {"coupling_ev", {l.coupling_ev.real(), l.coupling_ev.imag()}}};
        if (up && down) {
          const AmplitudeResult a = transition_amplitude(*cfg.perturbation, cfg.levels, l.from, l.to, ctx);
          e["amplitude"] = {a.amplitude.real(), a.amplitude.imag()};
          e["probability"] = a.probability;
          e["first_order_valid"] = a.first_order_valid;
          if (!a.first_order_valid) {
            warnings.push_back(fmt::format("transition ({},{:+}) -> ({},{:+}): |a| = {} > 0.1, first order unreliable",
                                           l.from.n, l.from.sigma.value(), l.to.n, l.to.sigma.value(),
                                           a.max_abs_amplitude));
          }
        }
        jl.push_back(e);
      }
      const auto json_path = output_path(cfg, "_lines.json");
      write_json(json_path, {{"config_hash", hash}, {"lines", jl}});
      result.artifacts.push_back(csv_path);
      result.artifacts.push_back(json_path);
    } else {
      warnings.push_back("levels given but no rotation parameters; line table skipped");
    }
  }
  summary["warnings"] = warnings;

  const auto path = output_path(cfg, "_summary.json");
  write_json(path, summary);
  result.artifacts.push_back(path);
  result.report = summary;
  return result;
}

namespace {

struct VerifyOutcome {
  SpinProjection sigma = SpinProjection::up();
  std::vector<SpinorState> lr;
  PropagatorRun oracle;
  std::vector<FidelitySample> fid;
  double min_fidelity = 1.0;
  double max_phase_error = 0.0;
};

VerifyOutcome verify_sigma(const PipelineRun& run, const PhaseSeries& phases, const RunConfig& cfg) {
  VerifyOutcome v;
  v.sigma = phases.sigma;
  v.lr = assemble_states(run.aux, phases);
  PropagateOptions opts;
  opts.method = cfg.oracle.method == "rk4" ? PropagatorMethod::RK4State : PropagatorMethod::ExponentialProduct;
  opts.record_every = cfg.oracle.substeps;
  v.oracle = propagate(run.traj, v.lr.front(), cfg.integrator.t_end,
                       std::abs(run.aux.step) / cfg.oracle.substeps, opts);
  v.fid = fidelity(v.oracle, v.lr);
  for (const auto& f : v.fid) {
    v.min_fidelity = std::min(v.min_fidelity, f.fidelity);
    v.max_phase_error = std::max(v.max_phase_error, std::abs(f.overlap_phase));
  }
  return v;
}

}  // namespace

CommandResult cmd_verify(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const PipelineRun run = run_pipeline(cfg);
  CommandResult result;

  json report;
  report["command"] = "verify";
  report["config_hash"] = hash;
  report["tolerances"] = {{"min_fidelity", cfg.oracle.min_fidelity}, {"max_phase_error", cfg.oracle.max_phase_error}};
  report["step"] = run.aux.step;
  report["oracle_method"] = cfg.oracle.method;
  if (!cfg.oracle.enabled) report["note"] = "oracle.enabled is false; verify runs it regardless";

  bool pass = true;
  json per_sigma = json::array();
  json warnings = json::array();
  for (const auto& ps : run.phases) {
    const VerifyOutcome v = verify_sigma(run, ps, cfg);
    const bool ok = v.min_fidelity >= cfg.oracle.min_fidelity && v.max_phase_error <= cfg.oracle.max_phase_error;
    pass = pass && ok;
    per_sigma.push_back({{"sigma", v.sigma.value()},
                         {"min_fidelity", v.min_fidelity},
                         {"max_phase_error", v.max_phase_error},
                         {"unitarity_defect", v.oracle.unitarity_defect},
                         {"norm_drift", v.oracle.norm_drift},
                         {"pass", ok}});
    for (const auto& w : v.oracle.warnings) warnings.push_back(w);

    const auto path = output_path(cfg, fmt::format("_verify_{}.csv", sigma_tag(v.sigma)));
    CsvWriter csv(path, hash,
                  {"t", "oracle_up_re", "oracle_up_im", "oracle_down_re", "oracle_down_im", "lr_up_re",
                   "lr_up_im", "lr_down_re", "lr_down_im", "fidelity", "overlap_phase"});
    for (std::size_t i = 0; i < v.fid.size(); ++i) {
      const Spinor& o = v.oracle.states[i].amplitudes;
      const Spinor& l = v.lr[i].amplitudes;
      csv.row({v.fid[i].t, o(0).real(), o(0).imag(), o(1).real(), o(1).imag(), l(0).real(), l(0).imag(),
               l(1).real(), l(1).imag(), v.fid[i].fidelity, v.fid[i].overlap_phase});
    }
    result.artifacts.push_back(path);
  }
  report["sigma"] = per_sigma;
  report["pass"] = pass;
  report["warnings"] = warnings;

  if (!pass) {
    // Refine both pipelines and report the observed convergence order of the
    // phase mismatch.
    json study = json::array();
    double previous = 0.0;
    for (int k = 0; k < 3; ++k) {
      RunConfig refined = cfg;
      refined.integrator.step = cfg.integrator.step / std::pow(2.0, k);
      json entry{{"step", refined.integrator.step}};
      try {
        const PipelineRun r = run_pipeline(refined);
        double worst_phase = 0.0, worst_fid = 1.0;
        for (const auto& ps : r.phases) {
          const VerifyOutcome v = verify_sigma(r, ps, refined);
          worst_phase = std::max(worst_phase, v.max_phase_error);
          worst_fid = std::min(worst_fid, v.min_fidelity);
        }
        entry["max_phase_error"] = worst_phase;
        entry["min_fidelity"] = worst_fid;
        if (k > 0 && previous > 0 && worst_phase > 0) entry["observed_order"] = std::log2(previous / worst_phase);
        previous = worst_phase;
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      study.push_back(entry);
    }
    report["convergence"] = study;
    result.exit_code = kExitVerificationFailure;
  }

  const auto path = output_path(cfg, "_verify.json");
  write_json(path, report);
  result.artifacts.push_back(path);
  result.report = report;
  return result;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, Execution exec) {
  if (!cfg.sweep) throw ConfigInvalid("sweep command needs a 'sweep' section");
  if (!closed_form_precession(cfg)) throw ConfigInvalid("sweep needs a constant_precession or static trajectory");

  const SweepConfig& sw = *cfg.sweep;
  const SpinProjection sigma = cfg.sigma.front();
  std::vector<SweepRow> rows(sw.values.size());

  for_each_index(rows.size(), exec, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.index = i;
    row.value = sw.values[i];
    row.omega0 = cfg.trajectory.omega0;
    row.Omega = cfg.trajectory.Omega;
    row.theta = cfg.trajectory.theta;
    if (sw.parameter == "Omega_ratio") row.Omega = row.value * row.omega0;
    if (sw.parameter == "Omega") row.Omega = row.value;
    if (sw.parameter == "theta") row.theta = row.value;
    if (sw.parameter == "omega0") row.omega0 = row.value;
    try {
      row.lambda = solve_precession_lambda(row.omega0, row.Omega, row.theta);
      row.period = row.Omega != 0.0 ? 2.0 * std::numbers::pi / std::abs(row.Omega)
                                    : cfg.integrator.t_end - cfg.integrator.t_start;
      const auto traj = OmegaTrajectory::constant_precession(row.omega0, row.Omega, row.theta, cfg.trajectory.phi0);
      const auto aux = integrate_auxiliary(traj, {row.lambda, cfg.trajectory.phi0}, 0.0, row.period,
                                           cfg.integrator.step, aux_options(cfg));
      row.phi_geo_period = geometric_phase(aux, sigma).back();
      row.berry_reference = berry_limit_check(row.theta, sigma);
      row.berry_rel_error = row.berry_reference != 0.0
                                ? std::abs(row.phi_geo_period - row.berry_reference) / std::abs(row.berry_reference)
                                : std::abs(row.phi_geo_period);
      row.shift_ev = spectral_shift(SpinProjection::up(), SpinProjection::down(), row.omega0, row.Omega, row.theta);
      row.max_lvn_residual = aux.max_lvn_residual;
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::NoSolution: row.status = "no-solution"; break;
        case ErrorKind::SingularityApproach: row.status = "singularity"; break;
        default: row.status = "invalid"; break;
      }
      row.message = e.what();
    }
  });
  return rows;
}

CommandResult cmd_sweep(const RunConfig& cfg, Execution exec) {
  const std::string hash = config_hash(cfg);
  const auto rows = run_sweep(cfg, exec);
  CommandResult result;
  const auto path = output_path(cfg, "_sweep.csv");
  CsvWriter csv(path, hash,
                {"index", "parameter", "value", "omega0", "Omega", "theta", "lambda", "period", "phi_geo_T",
                 "berry_reference", "berry_rel_error", "shift_ev", "max_lvn_residual", "status"});
  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (r.status == "ok") {
      csv.row({r.index, cfg.sweep->parameter, r.value, r.omega0, r.Omega, r.theta, r.lambda, r.period,
               r.phi_geo_period, r.berry_reference, r.berry_rel_error, r.shift_ev, r.max_lvn_residual, r.status});
    } else {
      ++failures;
      csv.row({r.index, cfg.sweep->parameter, r.value, r.omega0, r.Omega, r.theta, "", "", "", "", "", "", "",
               r.status});
    }
  }
  result.artifacts.push_back(path);
  result.report = {{"command", "sweep"}, {"config_hash", hash}, {"rows", rows.size()}, {"failed_rows", failures}};
  return result;
}

CommandResult cmd_scenario(const std::string& name, const std::filesystem::path& out) {
  RotationRegime regime;
  try {
    regime = find_preset(name);
  } catch (const InvalidArgument& e) {
    throw ConfigInvalid(e.what());
  }
  const RunConfig cfg = config_for_regime(regime);
  json j = to_json(cfg);
  j["provenance"] = {{"config_hash", config_hash(cfg)}, {"generator", "lrphase scenario"}};
  write_json(out, j);
  CommandResult result;
  result.artifacts.push_back(out);
  result.report = {{"command", "scenario"},
                   {"config_hash", config_hash(cfg)},
                   {"scenario", regime.name},
                   {"omega0", regime.omega0},
                   {"Omega", regime.Omega},
                   {"Omega_min", regime.Omega_min},
                   {"Omega_max", regime.Omega_max},
                   {"temperature", regime.temperature},
                   {"torque_J", regime.torque_J},
                   {"free_rotation_tau", free_rotation_correlation_time(c60_model(), regime.temperature)}};
  return result;
}

}  // namespace lrphase
