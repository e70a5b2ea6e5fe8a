#include <doctest.h>

#include <numbers>
#include <random>

#include "lrphase/errors.hpp"
#include "lrphase/invariant.hpp"
#include "lrphase/oracle.hpp"
#include "lrphase/parallel.hpp"
#include "lrphase/phase.hpp"
#include "lrphase/spectroscopy.hpp"
#include "test_oracles.hpp"

using namespace lrphase;
using std::numbers::pi;

namespace {

const SpinProjection kUp = SpinProjection::up();
const SpinProjection kDown = SpinProjection::down();
const StateLabel kUp0{0, kUp}, kDown0{0, kDown}, kUp1{1, kUp}, kDown1{1, kDown};

struct Run {
  AuxiliarySeries aux;
  PhaseSeries up, down;
  TransitionContext ctx() const { return {&aux, &up, &down}; }
};

Run run_lr(const OmegaTrajectory& tr, InitialAngles init, double t_end, double step) {
  Run r;
  r.aux = integrate_auxiliary(tr, init, t_end, step);
  r.up = accumulate_phases(r.aux, tr, kUp);
  r.down = accumulate_phases(r.aux, tr, kDown);
  return r;
}

PerturbationModel flip(Complex w, TimeProfile profile = TimeProfile::Constant, double nu = 0.0) {
  return PerturbationModel({{kDown0, kUp0, w}}, profile, nu, PerturbationFrame::Invariant);
}

std::vector<EnergyLevel> single_level() { return {{kUp0, 0.0}, {kDown0, 0.0}}; }

}  // namespace

TEST_CASE("unit conversion") {
  CHECK(ev_to_angular(kHbarEvSeconds) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(angular_to_ev(ev_to_angular(0.37)) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("levels and labels") {
  CHECK(kUp0 < kDown0);
  CHECK(kDown0 < kUp1);
  CHECK_FALSE(kUp1 < kUp0);
  const std::vector<EnergyLevel> dup{{kUp0, 0.0}, {kUp0, 1.0}};
  CHECK_THROWS_AS(validate_levels(dup), InvalidArgument);
  const std::vector<EnergyLevel> nan{{kUp0, NAN}};
  CHECK_THROWS_AS(validate_levels(nan), InvalidArgument);
  const auto lv = single_level();
  CHECK(level_energy_ev(lv, kDown0) == 0.0);
  CHECK_THROWS_AS(level_energy_ev(lv, kUp1), InvalidArgument);
}

TEST_CASE("perturbation model") {
  SUBCASE("Hermitian partner is implied") {
    const auto p = flip({0.0, 2e-6});
    CHECK(p.element_ev(kDown0, kUp0) == Complex(0.0, 2e-6));
    CHECK(p.element_ev(kUp0, kDown0) == Complex(0.0, -2e-6));
    CHECK(p.element_ev(kUp0, kUp0) == Complex(0.0, 0.0));
  }
  SUBCASE("non-Hermitian input is rejected") {
    CHECK_THROWS_AS(PerturbationModel({{kDown0, kUp0, 1.0}, {kUp0, kDown0, 2.0}}, TimeProfile::Constant),
                    InvalidArgument);
    CHECK_NOTHROW(PerturbationModel({{kDown0, kUp0, {1.0, 1.0}}, {kUp0, kDown0, {1.0, -1.0}}}, TimeProfile::Constant));
  }
  SUBCASE("profiles") {
    const auto c = flip(1.0);
    CHECK(c.profile(123.0) == 1.0);
    const auto m = flip(1.0, TimeProfile::MonochromaticDrive, 2.0);
    CHECK(m.profile(0.3) == doctest::Approx(std::cos(0.6)));
    CHECK(m.with_drive_frequency(5.0).drive_frequency() == 5.0);
    CHECK(m.with_drive_frequency(5.0).element_ev(kDown0, kUp0) == Complex(1.0, 0.0));
  }
  SUBCASE("lab-frame elements are dressed by V") {
    const Complex w(0.3, -0.4);
    const PerturbationModel lab({{kUp0, kDown0, w}, {kUp0, kUp0, 0.1}}, TimeProfile::Constant);
    testing::M2 h;
    h << 0.1, w, std::conj(w), 0.0;
    const InvariantParams p{0.0, 1.1, 0.7, 0.0, 0.0};
    const Mat2 V = transform_V(p);
    const testing::M2 d = V.adjoint() * h * V;
    for (auto to : {kUp0, kDown0}) {
      for (auto from : {kUp0, kDown0}) {
        CHECK(std::abs(lab.dressed_element_ev(to, from, V) - d(to.sigma.basis_index(), from.sigma.basis_index())) < 1e-15);
      }
    }
    const auto inv = flip(w);
    CHECK(inv.dressed_element_ev(kDown0, kUp0, V) == w);
  }
}

TEST_CASE("total phase") {
  const std::vector<EnergyLevel> lv{{kUp0, 0.0}, {kDown0, 0.0}, {kUp1, 0.2}};
  const PhaseRecord a{kUp, 2.0, 0.7, -0.1};
  CHECK(total_phase(kUp1, kUp0, a, a, std::vector<EnergyLevel>{{kUp0, 0.2}, {kUp1, 0.2}}, 2.0) == 0.0);
  CHECK(total_phase(kUp1, kUp0, a, a, lv, 2.0) == doctest::Approx(-ev_to_angular(0.2) * 2.0));

  const double l = pi / 2, th = pi / 3, W = 0.5, t = 3.0;
  const PhaseRecord up{kUp, t, 0.5 * std::cos(l - th) * t, W * 0.5 * (1 - std::cos(l)) * t};
  const PhaseRecord down{kDown, t, -up.phi_dyn, -up.phi_geo};
  CHECK(total_phase(kDown0, kUp0, up, down, lv, t) / t == doctest::Approx(1.3660254037844388).epsilon(1e-14));

  CHECK_THROWS_AS(total_phase(kDown0, kUp0, down, down, lv, t), InvalidArgument);
  CHECK_THROWS_AS(total_phase(kDown0, kUp0, up, down, lv, t + 1e-3), InvalidArgument);
  CHECK_THROWS_AS(total_phase(kDown1, kUp0, up, down, lv, t), InvalidArgument);
}

TEST_CASE("total phase matches phases recovered from the brute-force propagator") {
  std::vector<double> ts, th, ph;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.025 * i;
    ts.push_back(t);
    th.push_back(1.0 + 0.25 * std::sin(0.9 * t));
    ph.push_back(0.6 * t + 0.3 * std::sin(0.4 * t));
  }
  const auto tr = OmegaTrajectory::tabulated(1.0, ts, th, ph);
  const auto lr = run_lr(tr, default_initial_angles(tr), 8.0, 0.005);
  const auto lv = single_level();

  PhaseSeries ext_up{kUp, {}, 0, 0}, ext_down{kDown, {}, 0, 0};
  for (auto sigma : {kUp, kDown}) {
    SpinorState psi0;
    psi0.amplitudes = transform_V(lr.aux.samples.front()) * basis_state(sigma);
    const auto run = propagate(tr, psi0, 8.0, 0.005 / 8, {PropagatorMethod::RK4State, 8});
    REQUIRE(run.states.size() == lr.aux.samples.size());
    std::vector<double> phase;
    for (std::size_t i = 0; i < run.states.size(); ++i) {
      const Spinor ref = transform_V(lr.aux.samples[i]) * basis_state(sigma);
      phase.push_back(-std::arg(ref.dot(run.states[i].amplitudes)));
    }
    testing::unwrap(phase);
    auto& ext = sigma == kUp ? ext_up : ext_down;
    for (std::size_t i = 0; i < phase.size(); ++i) ext.records.push_back({sigma, lr.aux.samples[i].t, phase[i], 0.0});
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < lr.aux.samples.size(); i += 7) {
    const double t = lr.aux.samples[i].t;
    const double a = total_phase(kDown0, kUp0, lr.up.records[i], lr.down.records[i], lv, t);
    const double b = total_phase(kDown0, kUp0, ext_up.records[i], ext_down.records[i], lv, t);
    worst = std::max(worst, std::abs(a - b));
  }
  CHECK(worst < 1e-7);

  const auto pert = flip({3e-18, 1e-18});
  const auto a_lr = transition_amplitude(pert, lv, kUp0, kDown0, lr.ctx());
  const TransitionContext oracle_ctx{&lr.aux, &ext_up, &ext_down};
  const auto a_or = transition_amplitude(pert, lv, kUp0, kDown0, oracle_ctx);
  CHECK(std::abs(a_lr.amplitude - a_or.amplitude) <= 1e-6 * std::abs(a_or.amplitude));
}

TEST_CASE("spectral shift") {
  CHECK(spectral_shift_rate(kUp, kDown, 1e11, 1e12, pi / 4) == doctest::Approx(1931975666937.0132).epsilon(1e-12));
  CHECK(spectral_shift(kUp, kDown, 1e11, 1e12, pi / 4) == doctest::Approx(0.0012716494844177942).epsilon(1e-12));
  CHECK(spectral_shift(kUp, kUp, 1e11, 1e12, pi / 4) == 0.0);
  CHECK(spectral_shift(kUp, kDown, 1e11, 0.0, 0.7) == doctest::Approx(angular_to_ev(1e11)).epsilon(1e-15));
  CHECK_THROWS_AS(spectral_shift(kUp, kDown, 1e11, 1e12, 0.0), NoSolution);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> th(0.05, pi - 0.05), W(-5.0, 5.0);
  for (int k = 0; k < 50; ++k) {
    const double theta = th(rng), Omega = W(rng);
    CHECK(spectral_shift(kDown, kUp, 1.0, Omega, theta) == -spectral_shift(kUp, kDown, 1.0, Omega, theta));
  }
  double prev = std::abs(spectral_shift_rate(kUp, kDown, 1.0, 1e-2, 0.8) - 1.0);
  for (double Omega : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double dev = std::abs(spectral_shift_rate(kUp, kDown, 1.0, Omega, 0.8) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("first-order amplitude closed forms") {
  const double w0 = 1e12;
  const auto tr = OmegaTrajectory::static_field(w0, pi / 3, 0.4);
  const auto lv = single_level();
  const Complex W(2e-6, 0.0);
  const double rabi = ev_to_angular(std::abs(W));

  SUBCASE("zero coupling") {
    const auto r = run_lr(tr, default_initial_angles(tr), 1e-11, 1e-14);
    const auto a = transition_amplitude(flip(0.0), lv, kUp0, kDown0, r.ctx());
    CHECK(a.probability == 0.0);
  }
  SUBCASE("detuned constant coupling") {
    for (double T : {1.3e-11, 2.9e-11}) {
      const auto r = run_lr(tr, default_initial_angles(tr), T, 1e-14);
      const auto a = transition_amplitude(flip(W), lv, kUp0, kDown0, r.ctx());
      const double expected = rabi * rabi * std::pow(std::sin(w0 * T / 2) / (w0 / 2), 2);
      CHECK(a.probability == doctest::Approx(expected).epsilon(1e-6));
      CHECK(a.first_order_valid);
    }
  }
  SUBCASE("resonant growth is quadratic in time") {
    const std::vector<EnergyLevel> two{{kUp0, 0.0}, {kDown1, angular_to_ev(w0)}};
    const PerturbationModel p({{kDown1, kUp0, W}}, TimeProfile::Constant, 0.0, PerturbationFrame::Invariant);
    for (double T : {1e-11, 2e-11, 4e-11}) {
      const auto r = run_lr(tr, default_initial_angles(tr), T, 1e-14);
      const auto a = transition_amplitude(p, two, kUp0, kDown1, r.ctx());
      CHECK(a.probability == doctest::Approx(rabi * rabi * T * T).epsilon(1e-6));
    }
  }
  SUBCASE("validity flag") {
    const auto r = run_lr(tr, default_initial_angles(tr), 1e-11, 1e-14);
    const auto a = transition_amplitude(flip(1e-2), lv, kUp0, kDown0, r.ctx());
    CHECK(a.max_abs_amplitude > 0.1);
    CHECK_FALSE(a.first_order_valid);
  }
}

TEST_CASE("probability summed over final states stays bounded in the first-order window") {
  const auto tr = OmegaTrajectory::constant_precession(1e12, 3e11, 1.0);
  const double l = solve_precession_lambda(1e12, 3e11, 1.0);
  const auto r = run_lr(tr, {l, 0.0}, 2e-11, 1e-14);
  const std::vector<EnergyLevel> lv{{kUp0, 0.0}, {kDown0, 0.0}, {kUp1, 1e-4}, {kDown1, 1e-4}};
  const PerturbationModel p({{kDown0, kUp0, 5e-6}, {kUp1, kUp0, 5e-6}, {kDown1, kUp0, 5e-6}}, TimeProfile::Constant,
                            0.0, PerturbationFrame::Invariant);
  double total = 0.0;
  for (auto to : {kDown0, kUp1, kDown1}) {
    const auto a = transition_amplitude(p, lv, kUp0, to, r.ctx());
    CHECK(a.first_order_valid);
    total += a.probability;
  }
  CHECK(total > 0.0);
  CHECK(total <= 1 + 1e-6);
}

TEST_CASE("detuning scan peaks at the shifted gap; serial and parallel agree") {
  const double w0 = 1e12;
  const auto tr = OmegaTrajectory::static_field(w0, pi / 3, 0.0);
  const auto r = run_lr(tr, default_initial_angles(tr), 2e-10, 2e-14);
  const auto p = flip(1e-7, TimeProfile::MonochromaticDrive);
  std::vector<double> nus;
  for (int k = 0; k < 201; ++k) nus.push_back(w0 * (0.9 + 0.001 * k));
  const auto par = detuning_scan(p, single_level(), kUp0, kDown0, r.ctx(), nus, Execution::Parallel);
  const auto ser = detuning_scan(p, single_level(), kUp0, kDown0, r.ctx(), nus, Execution::Serial);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) CHECK(par[k].probability == ser[k].probability);
  CHECK(std::abs(locate_peak(par) - w0) < 0.5e-3 * w0);

  CHECK_THROWS_AS(detuning_scan(flip(1e-7), single_level(), kUp0, kDown0, r.ctx(), nus), InvalidArgument);
}

TEST_CASE("locate_peak refines with a parabola") {
  std::vector<ScanPoint> s;
  for (int k = 0; k < 11; ++k) s.push_back({double(k), 5 - (k - 6.3) * (k - 6.3)});
  CHECK(locate_peak(s) == doctest::Approx(6.3).epsilon(1e-12));
  CHECK(locate_peak(std::vector<ScanPoint>{{1.0, 3.0}, {2.0, 1.0}}) == 1.0);
  CHECK_THROWS_AS(locate_peak(std::vector<ScanPoint>{}), InvalidArgument);
}

TEST_CASE("line table") {
  const RotationParams still{1e11, 0.0, 0.7};
  SUBCASE("single level with a spin flip") {
    const auto lines = line_table(single_level(), flip(1e-6), still);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].from == kUp0);
    CHECK(lines[0].to == kDown0);
    CHECK(lines[0].bare_gap_ev == 0.0);
    CHECK(lines[0].shifted_position_ev == doctest::Approx(angular_to_ev(1e11)).epsilon(1e-15));
  }
  SUBCASE("spin-preserving lines sit at the bare gaps") {
    const std::vector<EnergyLevel> lv{{kUp0, 0.0}, {kUp1, 1.5}};
    const PerturbationModel p({{kUp1, kUp0, 1e-3}}, TimeProfile::Constant);
    const auto lines = line_table(lv, p, {1e11, 1e12, pi / 4});
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].shift_ev == 0.0);
    CHECK(lines[0].shifted_position_ev == -1.5);
  }
  SUBCASE("two levels with spin flips") {
    const std::vector<EnergyLevel> lv{{kUp0, 0.0}, {kDown0, 0.0}, {kUp1, 1.0}, {kDown1, 1.0}};
    const PerturbationModel p({{kDown0, kUp0, 1e-3}, {kDown1, kUp1, 1e-3}, {kDown1, kUp0, 1e-3}, {kUp1, kDown0, 1e-3}},
                              TimeProfile::Constant);
    const RotationParams rot{1e11, 1e12, pi / 4};
    const double s = spectral_shift(kUp, kDown, rot.omega0, rot.Omega, rot.theta);
    const auto lines = line_table(lv, p, rot);
    REQUIRE(lines.size() == 4);
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i - 1].shifted_position_ev <= lines[i].shifted_position_ev);
    CHECK(lines[0].shifted_position_ev == doctest::Approx(-1.0 - s));
    CHECK(lines[1].shifted_position_ev == doctest::Approx(-1.0 + s));
    CHECK(lines[1].shifted_position_ev - lines[0].shifted_position_ev == doctest::Approx(2 * s));
    CHECK(lines[2].shifted_position_ev == doctest::Approx(s));
    CHECK(lines[3].shifted_position_ev == doctest::Approx(s));
    for (const auto& line : lines) CHECK(line.shifted_position_ev == line.bare_gap_ev + line.shift_ev);
  }
}
