#include <doctest.h>

#include <numbers>
#include <random>

#include "lrphase/errors.hpp"
#include "lrphase/spin_algebra.hpp"
#include "test_oracles.hpp"

using namespace lrphase;
using lrphase::testing::scaling_squaring_exp;
using lrphase::testing::su2_generator;
using lrphase::testing::taylor_exp;

namespace {
const Complex I{0.0, 1.0};
}

TEST_CASE("spin operators: standard representation and SU(2) table") {
  const auto ops = build_spin_operators();
  Mat2 s3;
  s3 << 0.5, 0.0, 0.0, -0.5;
  CHECK(ops.s3 == s3);

  // Entries are 0, +-1/2, +-i/2: every product below is exact in binary floating point.
  CHECK(ops.s1 * ops.s2 - ops.s2 * ops.s1 == I * ops.s3);
  CHECK(ops.s2 * ops.s3 - ops.s3 * ops.s2 == I * ops.s1);
  CHECK(ops.s3 * ops.s1 - ops.s1 * ops.s3 == I * ops.s2);
  CHECK(ops.plus * ops.minus - ops.minus * ops.plus == 2.0 * ops.s3);
  CHECK(ops.plus == ops.s1 + I * ops.s2);
  CHECK(ops.minus == ops.s1 - I * ops.s2);

  for (const Mat2* m : {&ops.s1, &ops.s2, &ops.s3}) CHECK(*m == m->adjoint());

  CHECK(ops.plus * basis_state(SpinProjection::down()) == basis_state(SpinProjection::up()));
  CHECK(ops.plus * basis_state(SpinProjection::up()) == Spinor::Zero());
}

TEST_CASE("spin projection admits only +-1/2") {
  CHECK(SpinProjection::from_value(0.5) == SpinProjection::up());
  CHECK(SpinProjection::from_value(-0.5).value() == -0.5);
  CHECK_THROWS_AS(SpinProjection::from_value(1.0), InvalidArgument);
  CHECK_THROWS_AS(SpinProjection::from_value(0.0), InvalidArgument);
  CHECK(SpinProjection::up().flipped() == SpinProjection::down());
}

TEST_CASE("exp_su2 closed form") {
  CHECK((exp_su2(0.0) - Mat2::Identity()).norm() == 0.0);

  SUBCASE("lambda = pi, gamma = 0 is a pi rotation about y") {
    const Complex beta = -std::numbers::pi / 2;
    Mat2 expected;
    expected << 0.0, -1.0, 1.0, 0.0;
    CHECK((exp_su2(beta) - expected).norm() < 1e-15);
    CHECK((scaling_squaring_exp(su2_generator(beta)) - expected).norm() < 1e-13);
  }

  SUBCASE("randomized properties") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> gam(-10.0, 10.0);
    std::uniform_real_distribution<double> big(-50.0, 50.0);
    for (int k = 0; k < 200; ++k) {
      const Complex beta = -0.5 * lam(rng) * std::polar(1.0, -gam(rng));
      const Mat2 v = exp_su2(beta);
      CHECK(unitarity_defect(v) < 1e-14);
      CHECK((v * exp_su2(-beta) - Mat2::Identity()).norm() < 1e-13);
      CHECK((v - taylor_exp(su2_generator(beta))).norm() < 1e-12);

      const Complex wide(big(rng), big(rng));
      CHECK(unitarity_defect(exp_su2(wide)) < 1e-14);
      CHECK((exp_su2(wide) - scaling_squaring_exp(su2_generator(wide))).norm() < 1e-10);
    }
  }

  SUBCASE("tiny beta uses the series branch continuously") {
    const Complex beta(3e-9, -4e-9);
    CHECK((exp_su2(beta) - taylor_exp(su2_generator(beta))).norm() < 1e-16);
  }

  CHECK_THROWS_AS(exp_su2(Complex(std::nan(""), 0.0)), InvalidArgument);
  CHECK_THROWS_AS(exp_su2(Complex(0.0, INFINITY)), InvalidArgument);
}

TEST_CASE("exp_spin_rotation matches the series for exp(-i dt w.S)") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const Vec3 w(n(rng), n(rng), n(rng));
    const double dt = 0.3;
    const Mat2 u = exp_spin_rotation(w, dt);
    CHECK(unitarity_defect(u) < 1e-14);
    CHECK((u - scaling_squaring_exp(-I * dt * spin_dot(w))).norm() < 1e-12);
  }
  CHECK(exp_spin_rotation(Vec3::Zero(), 1.0) == Mat2::Identity());

  const auto ops = build_spin_operators();
  const Vec3 w(0.3, -1.2, 0.7);
  CHECK((spin_dot(w) - (w.x() * ops.s1 + w.y() * ops.s2 + w.z() * ops.s3)).norm() < 1e-16);
}
