#include "lrphase/phase.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

namespace {

void check_series(const AuxiliarySeries& series) {
  if (series.samples.empty()) throw InvalidArgument("empty auxiliary series");
}

void check_matches(const AuxiliarySeries& series, const OmegaTrajectory& traj) {
  check_series(series);
  if (series.omega0 != traj.omega0() || series.kind != traj.kind()) {
    throw InvalidArgument(fmt::format(
        "auxiliary series (omega0 = {}) was not produced for this trajectory (omega0 = {})",
        series.omega0, traj.omega0()));
  }
  const double lo = std::min(series.t_start(), series.t_end());
  const double hi = std::max(series.t_start(), series.t_end());
  const double slack = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  if (lo < traj.t_min() - slack || hi > traj.t_max() + slack) {
    throw InvalidArgument("auxiliary series extends beyond the trajectory domain");
  }
}

std::vector<double> scaled(std::vector<double> v, double s) {
  for (double& x : v) x *= s;
  return v;
}

}  // namespace

std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t i = 2; i < n; i += 2) {
    out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4 * f[i - 1] + f[i]);
  }
  // Odd points: extend the preceding even point by one interval of the
  // quadratic through (i-1, i, i+1), or (i-2, i-1, i) at the right edge.
  for (std::size_t i = 1; i < n; i += 2) {
    if (i + 1 < n) {
      out[i] = out[i - 1] + h / 12.0 * (5 * f[i - 1] + 8 * f[i] - f[i + 1]);
    } else {
      out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8 * f[i - 1] + 5 * f[i]);
    }
  }
  return out;
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

namespace {

std::vector<double> dynamical_integrand(const AuxiliarySeries& series, const OmegaTrajectory& traj) {
  std::vector<double> f(series.samples.size());
  const double w0 = traj.omega0();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const InvariantParams& p = series.samples[i];
    if (w0 == 0.0) {
      f[i] = 0.0;
      continue;
    }
    const AngleState a = traj.angles(p.t);
    f[i] = w0 * (std::cos(p.lambda) * std::cos(a.theta) +
                 std::sin(p.lambda) * std::sin(a.theta) * std::cos(p.gamma - a.phi));
  }
  return f;
}

std::vector<double> geometric_integrand(const AuxiliarySeries& series) {
  std::vector<double> f(series.samples.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const InvariantParams& p = series.samples[i];
    f[i] = p.gamma_dot * (1.0 - std::cos(p.lambda));
  }
  return f;
}

}  // namespace

std::vector<double> dynamical_phase(const AuxiliarySeries& series, const OmegaTrajectory& traj,
                                    SpinProjection sigma) {
  check_matches(series, traj);
  return scaled(cumulative_simpson(dynamical_integrand(series, traj), series.step), sigma.value());
}

std::vector<double> geometric_phase(const AuxiliarySeries& series, SpinProjection sigma) {
  check_series(series);
  return scaled(cumulative_simpson(geometric_integrand(series), series.step), sigma.value());
}

PhaseSeries accumulate_phases(const AuxiliarySeries& series, const OmegaTrajectory& traj,
                              SpinProjection sigma) {
  check_matches(series, traj);
  const auto fd = dynamical_integrand(series, traj);
  const auto fg = geometric_integrand(series);
  const auto dyn = scaled(cumulative_simpson(fd, series.step), sigma.value());
  const auto geo = scaled(cumulative_simpson(fg, series.step), sigma.value());

  PhaseSeries out;
  out.sigma = sigma;
  out.records.resize(dyn.size());
  for (std::size_t i = 0; i < dyn.size(); ++i) {
    out.records[i] = {sigma, series.samples[i].t, dyn[i], geo[i]};
  }
  const double s = sigma.value();
  out.dyn_error_estimate = std::abs(dyn.back() - s * cumulative_trapezoid(fd, series.step).back());
  out.geo_error_estimate = std::abs(geo.back() - s * cumulative_trapezoid(fg, series.step).back());
  return out;
}

double berry_limit_check(double theta, SpinProjection sigma) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw InvalidArgument(fmt::format("theta = {} outside [0, pi]", theta));
  }
  return 2.0 * std::numbers::pi * sigma.value() * (1.0 - std::cos(theta));
}

SpinorState assemble_state(const InvariantParams& p, const PhaseRecord& phases) {
  SpinorState s;
  s.time = p.t;
  s.amplitudes = std::polar(1.0, -phases.phi_total()) * (transform_V(p) * basis_state(phases.sigma));
  return s;
}

std::vector<SpinorState> assemble_states(const AuxiliarySeries& series, const PhaseSeries& phases) {
  if (series.samples.size() != phases.records.size()) {
    throw InvalidArgument("phase series and auxiliary series lengths differ");
  }
  std::vector<SpinorState> out(series.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = assemble_state(series.samples[i], phases.records[i]);
  }
  return out;
}

}  // namespace lrphase
