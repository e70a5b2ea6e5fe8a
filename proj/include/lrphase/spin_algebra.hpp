#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lrphase {

// Natural units (hbar = 1) throughout the engine.

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3d;

/// Eigenvalue of S3 for a spin-1/2 particle: +1/2 or -1/2.
class SpinProjection {
 public:
  static constexpr SpinProjection up() { return SpinProjection(1); }
  static constexpr SpinProjection down() { return SpinProjection(-1); }

  /// Accepts exactly +0.5 or -0.5.
  static SpinProjection from_value(double sigma);

  constexpr double value() const { return 0.5 * sign_; }
  constexpr int sign() const { return sign_; }
  /// Row of |sigma> in the standard basis (|+1/2> = e0, |-1/2> = e1).
  constexpr int basis_index() const { return sign_ > 0 ? 0 : 1; }
  constexpr SpinProjection flipped() const { return SpinProjection(-sign_); }

  constexpr bool operator==(const SpinProjection&) const = default;

 private:
  constexpr explicit SpinProjection(int sign) : sign_(sign) {}
  int sign_;
};

struct SpinOperators {
  Mat2 s1;
  Mat2 s2;
  Mat2 s3;
  Mat2 plus;   // S+ = [[0,1],[0,0]]
  Mat2 minus;  // S- = [[0,0],[1,0]]
};

SpinOperators build_spin_operators();

/// Standard basis vector |sigma>.
Spinor basis_state(SpinProjection sigma);

/// exp(beta S+ - beta* S-) in closed form. The exponent is anti-Hermitian, so
/// the result is unitary: [[cos r, beta sin r / r], [-beta* sin r / r, cos r]]
/// with r = |beta|.
Mat2 exp_su2(Complex beta);

/// exp(-i dt w.S) for a real field w (the propagator of H = w.S over dt).
Mat2 exp_spin_rotation(const Vec3& w, double dt);

/// w.S as a 2x2 Hermitian matrix.
Mat2 spin_dot(const Vec3& w);

double unitarity_defect(const Mat2& u);

/// Spinor tagged with the time it refers to.
struct SpinorState {
  Spinor amplitudes = Spinor::Zero();
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
};

}  // namespace lrphase
