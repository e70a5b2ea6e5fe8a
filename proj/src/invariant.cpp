#include "lrphase/invariant.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

namespace {

struct AngleRates {
  double lambda;
  double gamma;
};

// Fourth-order finite differences of an equally spaced series.
std::vector<double> path_derivative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  const double c = 1.0 / (12.0 * h);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = c * (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]);
  }
  d[0] = c * (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]);
  d[1] = c * (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]);
  const std::size_t m = n - 1;
  d[m] = c * (25 * f[m] - 48 * f[m - 1] + 36 * f[m - 2] - 16 * f[m - 3] + 3 * f[m - 4]);
  d[m - 1] = c * (3 * f[m] + 10 * f[m - 1] - 18 * f[m - 2] + 6 * f[m - 3] - f[m - 4]);
  return d;
}

AuxiliarySeries integrate_fixed(const OmegaTrajectory& traj, InitialAngles init, double t_start,
                                double t_end, double step, double guard) {
  const double span = t_end - t_start;
  const auto nsteps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(span) / step - 1e-9)));
  const double h = span / static_cast<double>(nsteps);

  AuxiliarySeries out;
  out.step = h;
  out.omega0 = traj.omega0();
  out.kind = traj.kind();
  out.samples.resize(nsteps + 1);

  double lambda = init.lambda0, gamma = init.gamma0;
  out.samples[0] = {t_start, lambda, gamma, 0.0, 0.0};

  auto rhs = [&](double t, double l, double g) {
    const auto [dl, dg] = auxiliary_rhs(traj, t, l, g);
    return AngleRates{dl, dg};
  };

  for (std::size_t n = 0; n < nsteps; ++n) {
    const double t = t_start + static_cast<double>(n) * h;
    const AngleRates k1 = rhs(t, lambda, gamma);
    const AngleRates k2 = rhs(t + h / 2, lambda + h / 2 * k1.lambda, gamma + h / 2 * k1.gamma);
    const AngleRates k3 = rhs(t + h / 2, lambda + h / 2 * k2.lambda, gamma + h / 2 * k2.gamma);
    const AngleRates k4 = rhs(t + h, lambda + h * k3.lambda, gamma + h * k3.gamma);
    lambda += h / 6 * (k1.lambda + 2 * k2.lambda + 2 * k3.lambda + k4.lambda);
    gamma += h / 6 * (k1.gamma + 2 * k2.gamma + 2 * k3.gamma + k4.gamma);

    const double t_next = n + 1 == nsteps ? t_end : t_start + static_cast<double>(n + 1) * h;
    if (!std::isfinite(lambda) || !std::isfinite(gamma) || lambda <= guard ||
        lambda >= std::numbers::pi - guard) {
      throw SingularityApproach(
          fmt::format("invariant angle lambda = {} left ({}, pi - {}) at t = {}", lambda, guard,
                      guard, t_next),
          t_next);
    }
    out.samples[n + 1] = {t_next, lambda, gamma, 0.0, 0.0};
  }

  if (out.samples.size() >= 5) {
    std::vector<double> ls(out.samples.size()), gs(out.samples.size());
    for (std::size_t i = 0; i < ls.size(); ++i) {
      ls[i] = out.samples[i].lambda;
      gs[i] = out.samples[i].gamma;
    }
    const auto dl = path_derivative(ls, h);
    const auto dg = path_derivative(gs, h);
    for (std::size_t i = 0; i < ls.size(); ++i) {
      out.samples[i].lambda_dot = dl[i];
      out.samples[i].gamma_dot = dg[i];
    }
  } else {
    // Too short for the stencil; fall back to the vector field.
    for (auto& s : out.samples) {
      std::tie(s.lambda_dot, s.gamma_dot) = auxiliary_rhs(traj, s.t, s.lambda, s.gamma);
    }
  }

  out.lvn_residual.resize(out.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.lvn_residual[i] = lvn_residual(out.samples[i], traj);
    out.max_lvn_residual = std::max(out.max_lvn_residual, out.lvn_residual[i]);
  }
  return out;
}

}  // namespace

InitialAngles default_initial_angles(const OmegaTrajectory& traj, double t0) {
  const AngleState a = traj.angles(t0);
  return {a.theta, a.phi};
}

std::pair<double, double> auxiliary_rhs(const OmegaTrajectory& traj, double t, double lambda,
                                        double gamma) {
  const double w0 = traj.omega0();
  if (w0 == 0.0) return {0.0, 0.0};
  const AngleState a = traj.angles(t);
  const double st = std::sin(a.theta), ct = std::cos(a.theta);
  const double d = a.phi - gamma;
  const double lambda_dot = w0 * st * std::sin(d);
  const double gamma_dot = w0 * (ct - st * std::cos(d) * std::cos(lambda) / std::sin(lambda));
  return {lambda_dot, gamma_dot};
}

AuxiliarySeries integrate_auxiliary(const OmegaTrajectory& traj, InitialAngles init,
                                    double t_start, double t_end, double step,
                                    const AuxiliaryOptions& options) {
  if (!(step > 0) || !std::isfinite(step)) {
    throw InvalidArgument(fmt::format("integrator step must be positive, got {}", step));
  }
  if (!std::isfinite(t_start) || !std::isfinite(t_end)) {
    throw InvalidArgument("integration bounds must be finite");
  }
  const double guard = options.lambda_guard;
  if (!(init.lambda0 > guard && init.lambda0 < std::numbers::pi - guard)) {
    throw InvalidArgument(fmt::format("lambda0 = {} outside ({}, pi - {})", init.lambda0, guard, guard));
  }
  if (!std::isfinite(init.gamma0)) throw InvalidArgument("gamma0 must be finite");
  if (t_start == t_end) {
    AuxiliarySeries out;
    out.omega0 = traj.omega0();
    out.kind = traj.kind();
    InvariantParams p{t_start, init.lambda0, init.gamma0, 0.0, 0.0};
    std::tie(p.lambda_dot, p.gamma_dot) = auxiliary_rhs(traj, t_start, p.lambda, p.gamma);
    out.samples = {p};
    out.lvn_residual = {lvn_residual(p, traj)};
    out.max_lvn_residual = out.lvn_residual[0];
    return out;
  }

  AuxiliarySeries out = integrate_fixed(traj, init, t_start, t_end, step, guard);
  if (options.adaptive) {
    double h = step;
    int halvings = 0;
    while (out.max_lvn_residual > options.residual_tolerance && halvings < options.max_halvings) {
      h /= 2;
      ++halvings;
      out = integrate_fixed(traj, init, t_start, t_end, h, guard);
    }
    out.halvings = halvings;
  }
  return out;
}

double solve_precession_lambda(double omega0, double Omega, double theta) {
  if (!std::isfinite(omega0) || !std::isfinite(Omega) || !std::isfinite(theta)) {
    throw InvalidArgument("solve_precession_lambda: non-finite input");
  }
  if (theta < 0 || theta > std::numbers::pi) {
    throw InvalidArgument(fmt::format("theta = {} outside [0, pi]", theta));
  }
  if (Omega == 0.0) return theta;
  const double st = std::sin(theta);
  if (theta == 0.0 || theta == std::numbers::pi || omega0 == 0.0) {
    throw NoSolution(fmt::format(
        "no precession-consistent lambda for theta = {}, omega0 = {}, Omega = {}", theta, omega0, Omega));
  }
  // cot(lambda) = (cos th - Omega/w0) / sin th, with sin(lambda) > 0.
  const double lambda = std::atan2(omega0 * st, omega0 * std::cos(theta) - Omega);
  if (!(lambda > 0.0 && lambda < std::numbers::pi)) {
    throw NoSolution(fmt::format("precession-consistent lambda = {} not in (0, pi)", lambda));
  }
  const double check = omega0 * std::sin(lambda - theta) / std::sin(lambda);
  if (std::abs(check - Omega) > 1e-12 * std::max(std::abs(Omega), omega0)) {
    throw NoSolution(fmt::format("precession relation not satisfied: {} vs {}", check, Omega));
  }
  return lambda;
}

Mat2 invariant_matrix(const InvariantParams& p) {
  const double s = std::sin(p.lambda), c = std::cos(p.lambda);
  const Complex e = std::polar(1.0, p.gamma);
  Mat2 m;
  m << 0.5 * c, 0.5 * s * std::conj(e), 0.5 * s * e, -0.5 * c;
  return m;
}

Mat2 transform_V(const InvariantParams& p) {
  return exp_su2(-0.5 * p.lambda * std::polar(1.0, -p.gamma));
}

double lvn_residual(const InvariantParams& p, const OmegaTrajectory& traj) {
  const double s = std::sin(p.lambda), c = std::cos(p.lambda);
  const Complex i{0.0, 1.0};
  const Complex e = std::polar(1.0, p.gamma);
  Mat2 dI;
  dI << -0.5 * s * p.lambda_dot, 0.5 * (c * p.lambda_dot - i * s * p.gamma_dot) * std::conj(e),
      0.5 * (c * p.lambda_dot + i * s * p.gamma_dot) * e, 0.5 * s * p.lambda_dot;
  const Mat2 I = invariant_matrix(p);
  const Mat2 H = spin_dot(traj.omega_at(p.t));
  const double r = (dI - i * (I * H - H * I)).norm();
  return traj.omega0() > 0 ? r / traj.omega0() : r;
}

}  // namespace lrphase
