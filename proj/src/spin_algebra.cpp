#include "lrphase/spin_algebra.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

SpinProjection SpinProjection::from_value(double sigma) {
  if (sigma == 0.5) return up();
  if (sigma == -0.5) return down();
  throw InvalidArgument(fmt::format("spin projection must be +0.5 or -0.5, got {}", sigma));
}

SpinOperators build_spin_operators() {
  const Complex i{0.0, 1.0};
  SpinOperators ops;
  ops.plus << 0.0, 1.0, 0.0, 0.0;
  ops.minus << 0.0, 0.0, 1.0, 0.0;
  ops.s1 << 0.0, 0.5, 0.5, 0.0;
  ops.s2 << 0.0, -0.5 * i, 0.5 * i, 0.0;
  ops.s3 << 0.5, 0.0, 0.0, -0.5;
  return ops;
}

Spinor basis_state(SpinProjection sigma) {
  Spinor s = Spinor::Zero();
  s(sigma.basis_index()) = 1.0;
  return s;
}

Mat2 exp_su2(Complex beta) {
  if (!std::isfinite(beta.real()) || !std::isfinite(beta.imag())) {
    throw InvalidArgument("exp_su2: non-finite beta");
  }
  const double r = std::abs(beta);
  // sin(r)/r, series near zero
  const double sinc = r < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r;
  const double c = std::cos(r);
  Mat2 v;
  v << c, beta * sinc, -std::conj(beta) * sinc, c;
  return v;
}

Mat2 exp_spin_rotation(const Vec3& w, double dt) {
  // exp(-i dt w.S) = cos(a) 1 - i sin(a) (n.sigma), a = |w| dt / 2
  const double wn = w.norm();
  const double a = 0.5 * wn * dt;
  const Complex i{0.0, 1.0};
  Mat2 u = Mat2::Identity() * std::cos(a);
  if (wn == 0.0) return u;
  const Vec3 n = w / wn;
  const double s = std::sin(a);
  u(0, 0) -= i * s * n.z();
  u(1, 1) += i * s * n.z();
  u(0, 1) = -i * s * Complex(n.x(), -n.y());
  u(1, 0) = -i * s * Complex(n.x(), n.y());
  return u;
}

Mat2 spin_dot(const Vec3& w) {
  Mat2 h;
  h << 0.5 * w.z(), 0.5 * Complex(w.x(), -w.y()), 0.5 * Complex(w.x(), w.y()), -0.5 * w.z();
  return h;
}

double unitarity_defect(const Mat2& u) {
  return (u.adjoint() * u - Mat2::Identity()).norm();
}

}  // namespace lrphase
