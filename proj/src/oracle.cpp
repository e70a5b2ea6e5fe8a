#include "lrphase/oracle.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

namespace {

Spinor schrodinger_rhs(const OmegaTrajectory& traj, double t, const Spinor& psi) {
  return Complex(0.0, -1.0) * (spin_dot(traj.omega_at(t)) * psi);
}

Mat2 schrodinger_rhs(const OmegaTrajectory& traj, double t, const Mat2& u) {
  return Complex(0.0, -1.0) * (spin_dot(traj.omega_at(t)) * u);
}

template <class State>
State rk4_step(const OmegaTrajectory& traj, double t, double h, const State& y) {
  const State k1 = schrodinger_rhs(traj, t, y);
  const State k2 = schrodinger_rhs(traj, t + h / 2, State(y + (h / 2) * k1));
  const State k3 = schrodinger_rhs(traj, t + h / 2, State(y + (h / 2) * k2));
  const State k4 = schrodinger_rhs(traj, t + h, State(y + h * k3));
  return y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

PropagatorRun propagate(const OmegaTrajectory& traj, const SpinorState& psi0, double t_end,
                        double step, const PropagateOptions& options) {
  if (!(step > 0) || !std::isfinite(step)) {
    throw InvalidArgument(fmt::format("propagator step must be positive, got {}", step));
  }
  if (options.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (!std::isfinite(t_end)) throw InvalidArgument("t_end must be finite");

  const double t0 = psi0.time;
  const double span = t_end - t0;
  const auto every = static_cast<std::size_t>(options.record_every);
  auto blocks = static_cast<std::size_t>(std::ceil(std::abs(span) / (step * every) - 1e-9));
  if (span != 0.0) blocks = std::max<std::size_t>(blocks, 1);
  const std::size_t nsteps = blocks * every;
  const double h = nsteps ? span / static_cast<double>(nsteps) : 0.0;

  PropagatorRun run;
  run.step = h;
  run.method = options.method;
  if (traj.omega0() * std::abs(h) >= 0.1) {
    run.warnings.push_back(fmt::format("omega0 * step = {} >= 0.1; oracle accuracy degraded",
                                       traj.omega0() * std::abs(h)));
  }
  run.states.reserve(blocks + 1);
  run.states.push_back(psi0);

  Spinor psi = psi0.amplitudes;
  Mat2 u = Mat2::Identity();
  const double norm0 = psi.norm();
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    if (options.method == PropagatorMethod::ExponentialProduct) {
      const Mat2 step_u = exp_spin_rotation(traj.omega_at(t + h / 2), h);
      psi = step_u * psi;
      u = step_u * u;
    } else {
      psi = rk4_step(traj, t, h, psi);
      u = rk4_step(traj, t, h, u);
    }
    run.unitarity_defect = std::max(run.unitarity_defect, unitarity_defect(u));
    run.norm_drift = std::max(run.norm_drift, std::abs(psi.norm() - norm0));
    if ((n + 1) % every == 0) {
      const double tn = n + 1 == nsteps ? t_end : t0 + static_cast<double>(n + 1) * h;
      run.states.push_back({psi, tn});
    }
  }
  return run;
}

std::vector<FidelitySample> fidelity(const PropagatorRun& run, const std::vector<SpinorState>& lr_states) {
  if (run.states.size() != lr_states.size()) {
    throw InvalidArgument(fmt::format("time grids differ: {} oracle samples vs {} samples",
                                      run.states.size(), lr_states.size()));
  }
  if (run.states.empty()) return {};
  const double span = std::max(std::abs(run.states.back().time - run.states.front().time), 1e-300);
  std::vector<FidelitySample> out(run.states.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const SpinorState& a = run.states[i];
    const SpinorState& b = lr_states[i];
    if (std::abs(a.time - b.time) > 1e-9 * span) {
      throw InvalidArgument(fmt::format("time grids differ at sample {}: {} vs {}", i, a.time, b.time));
    }
    const Complex ov = a.amplitudes.dot(b.amplitudes);  // conjugates a
    out[i] = {a.time, std::abs(ov), std::arg(ov)};
  }
  return out;
}

}  // namespace lrphase
