#include "lrphase/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include "lrphase/errors.hpp"

namespace lrphase {

namespace {

struct GslSplineDeleter {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};
using GslSplinePtr = std::unique_ptr<gsl_spline, GslSplineDeleter>;

GslSplinePtr make_spline(const std::vector<double>& x, const std::vector<double>& y) {
  // Errors are reported through return codes; the default handler aborts.
  static const bool handler_off = (gsl_set_error_handler_off(), true);
  (void)handler_off;
  GslSplinePtr s(gsl_spline_alloc(gsl_interp_cspline, x.size()));
  if (!s || gsl_spline_init(s.get(), x.data(), y.data(), x.size()) != GSL_SUCCESS) {
    throw InvalidArgument("tabulated trajectory: spline construction failed");
  }
  return s;
}

// Central difference with one Richardson extrapolation. Disagreement between
// the two step sizes flags a kink or a discontinuity.
double richardson_derivative(const std::function<double(double)>& f, double t, double scale) {
  const double h = 1e-4 * scale;
  const double d1 = (f(t + h) - f(t - h)) / (2 * h);
  const double d2 = (f(t + h / 2) - f(t - h / 2)) / h;
  const double d = (4 * d2 - d1) / 3;
  if (!std::isfinite(d)) {
    throw NumericDerivativeFailure(fmt::format("non-finite angle derivative at t = {}", t));
  }
  if (std::abs(d1 - d2) > 1e-3 * std::max(1.0, std::abs(d))) {
    throw NumericDerivativeFailure(fmt::format("angle not differentiable at t = {}", t));
  }
  // One-sided slopes: their gap shrinks like h when smooth, stays put at a kink.
  const double f0 = f(t);
  const double gap1 = (f(t + h) - f0) / h - (f0 - f(t - h)) / h;
  const double gap2 = (f(t + h / 2) - f0) / (h / 2) - (f0 - f(t - h / 2)) / (h / 2);
  if (std::abs(gap1) > 1e-6 * std::max(1.0, std::abs(d)) && std::abs(gap2) > 0.75 * std::abs(gap1)) {
    throw NumericDerivativeFailure(fmt::format("angle has a kink at t = {}", t));
  }
  return d;
}

}  // namespace

struct OmegaTrajectory::Spline {
  std::vector<double> t;
  GslSplinePtr theta;
  GslSplinePtr phi;
};

OmegaTrajectory OmegaTrajectory::constant_precession(double omega0, double Omega, double theta,
                                                     double phi0) {
  if (!std::isfinite(omega0) || !std::isfinite(Omega) || !std::isfinite(theta) ||
      !std::isfinite(phi0)) {
    throw InvalidArgument("constant precession: non-finite parameter");
  }
  if (omega0 < 0) throw InvalidArgument("omega0 must be non-negative");
  if (theta < 0 || theta > std::numbers::pi) {
    throw InvalidArgument(fmt::format("theta = {} outside [0, pi]", theta));
  }
  OmegaTrajectory tr;
  tr.kind_ = TrajectoryKind::ConstantPrecession;
  tr.omega0_ = omega0;
  tr.Omega_ = Omega;
  tr.theta0_ = theta;
  tr.phi0_ = phi0;
  return tr;
}

OmegaTrajectory OmegaTrajectory::static_field(double omega0, double theta, double phi) {
  return constant_precession(omega0, 0.0, theta, phi);
}

OmegaTrajectory OmegaTrajectory::tabulated(double omega0, std::vector<double> t,
                                           std::vector<double> theta, std::vector<double> phi) {
  if (!std::isfinite(omega0) || omega0 < 0) throw InvalidArgument("omega0 must be finite and >= 0");
  if (t.size() != theta.size() || t.size() != phi.size()) {
    throw InvalidArgument("tabulated trajectory: column lengths differ");
  }
  if (t.size() < 3) throw InvalidArgument("tabulated trajectory: need at least 3 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(theta[i]) || !std::isfinite(phi[i])) {
      throw InvalidArgument(fmt::format("tabulated trajectory: non-finite value in row {}", i));
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw InvalidArgument(fmt::format("tabulated trajectory: t not increasing at row {}", i));
    }
    if (theta[i] < 0 || theta[i] > std::numbers::pi) {
      throw InvalidArgument(fmt::format("tabulated trajectory: theta outside [0, pi] at row {}", i));
    }
  }

  auto sp = std::make_shared<Spline>();
  sp->theta = make_spline(t, theta);
  sp->phi = make_spline(t, phi);
  sp->t = std::move(t);

  OmegaTrajectory tr;
  tr.kind_ = TrajectoryKind::Tabulated;
  tr.omega0_ = omega0;
  tr.spline_ = std::move(sp);

  if (omega0 > 0) {
    for (double ti : tr.spline_->t) {
      const double rel = std::abs(tr.omega_at(ti).norm() - omega0) / omega0;
      if (rel > 1e-9) {
        throw InvalidArgument(fmt::format("tabulated trajectory: |omega| deviates by {} at t = {}", rel, ti));
      }
    }
  }
  return tr;
}

OmegaTrajectory OmegaTrajectory::custom(double omega0, AngleFn angles,
                                        AngleDerivativeFn derivatives) {
  if (!std::isfinite(omega0) || omega0 < 0) throw InvalidArgument("omega0 must be finite and >= 0");
  if (!angles) throw InvalidArgument("custom trajectory: angle function required");
  OmegaTrajectory tr;
  tr.kind_ = TrajectoryKind::Custom;
  tr.omega0_ = omega0;
  tr.angle_fn_ = std::move(angles);
  tr.derivative_fn_ = std::move(derivatives);
  return tr;
}

double OmegaTrajectory::t_min() const {
  return kind_ == TrajectoryKind::Tabulated ? spline_->t.front() : -INFINITY;
}

double OmegaTrajectory::t_max() const {
  return kind_ == TrajectoryKind::Tabulated ? spline_->t.back() : INFINITY;
}

void OmegaTrajectory::check_domain(double t) const {
  // A relative slack absorbs round-off in grid times that land on the end points.
  const double lo = t_min(), hi = t_max();
  const double slack = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  if (!(t >= lo - slack && t <= hi + slack)) {
    throw OutOfRange(fmt::format("t = {} outside trajectory domain [{}, {}]", t, lo, hi));
  }
}

AngleState OmegaTrajectory::angles(double t) const {
  switch (kind_) {
    case TrajectoryKind::ConstantPrecession:
      return {theta0_, phi0_ + Omega_ * t, 0.0, Omega_};
    case TrajectoryKind::Tabulated: {
      check_domain(t);
      const double tc = std::clamp(t, spline_->t.front(), spline_->t.back());
      AngleState a;
      a.theta = gsl_spline_eval(spline_->theta.get(), tc, nullptr);
      a.phi = gsl_spline_eval(spline_->phi.get(), tc, nullptr);
      a.theta_dot = gsl_spline_eval_deriv(spline_->theta.get(), tc, nullptr);
      a.phi_dot = gsl_spline_eval_deriv(spline_->phi.get(), tc, nullptr);
      return a;
    }
    case TrajectoryKind::Custom: {
      AngleState a;
      std::tie(a.theta, a.phi) = angle_fn_(t);
      if (derivative_fn_) {
        std::tie(a.theta_dot, a.phi_dot) = derivative_fn_(t);
      } else {
        const double scale = std::max(1.0, std::abs(t));
        a.theta_dot = richardson_derivative([&](double s) { return angle_fn_(s).first; }, t, scale);
        a.phi_dot = richardson_derivative([&](double s) { return angle_fn_(s).second; }, t, scale);
      }
      return a;
    }
  }
  return {};
}

Vec3 OmegaTrajectory::omega_at(double t) const {
  const AngleState a = angles(t);
  const double st = std::sin(a.theta);
  return omega0_ * Vec3(st * std::cos(a.phi), st * std::sin(a.phi), std::cos(a.theta));
}

Vec3 OmegaTrajectory::omega_dot_at(double t) const {
  const AngleState a = angles(t);
  const double st = std::sin(a.theta), ct = std::cos(a.theta);
  const double sp = std::sin(a.phi), cp = std::cos(a.phi);
  return omega0_ * Vec3(ct * cp * a.theta_dot - st * sp * a.phi_dot,
                        ct * sp * a.theta_dot + st * cp * a.phi_dot,
                        -st * a.theta_dot);
}

EffectiveField effective_field(const OmegaTrajectory& traj, double t) {
  if (traj.omega0() == 0.0) return {};
  const Vec3 w = traj.omega_at(t);
  const Vec3 wd = traj.omega_dot_at(t);
  return {w.cross(wd) / w.squaredNorm()};
}

OmegaTrajectory load_tabulated_csv(const std::filesystem::path& path, double omega0) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open trajectory file {}", path.string()));

  std::vector<double> t, theta, phi;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line) if (c != ' ') compact += c;
      if (compact != "t,theta,phi") {
        throw InvalidArgument(fmt::format("{}: expected header 't,theta,phi', got '{}'", path.string(), line));
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(row, cell, ',')) {
        throw InvalidArgument(fmt::format("{}:{}: expected 3 columns", path.string(), lineno));
      }
      try {
        std::size_t used = 0;
        v[k] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("{}:{}: bad number '{}'", path.string(), lineno, cell));
      }
    }
    if (std::getline(row, cell, ',')) {
      throw InvalidArgument(fmt::format("{}:{}: too many columns", path.string(), lineno));
    }
    t.push_back(v[0]);
    theta.push_back(v[1]);
    phi.push_back(v[2]);
  }
  if (!header_seen) throw InvalidArgument(fmt::format("{}: missing header", path.string()));
  return OmegaTrajectory::tabulated(omega0, std::move(t), std::move(theta), std::move(phi));
}

}  // namespace lrphase
