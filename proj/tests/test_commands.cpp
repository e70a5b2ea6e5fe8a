#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lrphase/commands.hpp"
#include "lrphase/config.hpp"
#include "lrphase/errors.hpp"
#include "lrphase/scenario.hpp"

using namespace lrphase;
using nlohmann::json;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "lrphase_cmd_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunConfig demo(const fs::path& dir) {
  RunConfig cfg;
  cfg.trajectory.kind = "constant_precession";
  cfg.trajectory.omega0 = 1.0;
  cfg.trajectory.Omega = 0.5;
  cfg.trajectory.theta = pi / 6;
  cfg.initial.mode = "precession";
  cfg.integrator.step = 0.01;
  cfg.integrator.t_end = 2 * 2 * pi / 0.5;
  cfg.oracle.enabled = true;
  cfg.oracle.substeps = 16;
  cfg.output.dir = dir.string();
  cfg.output.prefix = "demo";
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorKind::ConfigInvalid) == kExitConfigInvalid);
  CHECK(exit_code_for(ErrorKind::InvalidArgument) == kExitConfigInvalid);
  CHECK(exit_code_for(ErrorKind::SingularityApproach) == kExitNumericFailure);
  CHECK(exit_code_for(ErrorKind::NoSolution) == kExitNumericFailure);
  CHECK(exit_code_for(ErrorKind::NumericDerivativeFailure) == kExitNumericFailure);
  CHECK(exit_code_for(ErrorKind::VerificationFailure) == kExitVerificationFailure);
}

TEST_CASE("simulate: precession demo rates") {
  const auto dir = fresh_dir("simulate");
  const auto cfg = demo(dir);
  const auto res = cmd_simulate(cfg);
  CHECK(res.exit_code == kExitOk);
  const auto& s = res.report;
  const double l = s["analytic"]["lambda"].get<double>();
  for (const auto& p : s["phases"]) {
    const double sigma = p["sigma"].get<double>();
    const double geo = 0.5 * sigma * (1 - std::cos(l));
    const double dyn = sigma * std::cos(l - pi / 6);
    CHECK(p["phi_geo_rate"].get<double>() == doctest::Approx(geo).epsilon(1e-9));
    CHECK(p["phi_dyn_rate"].get<double>() == doctest::Approx(dyn).epsilon(1e-9));
  }
  CHECK(s["max_lvn_residual"].get<double>() < 1e-9);
  for (const char* f : {"demo_auxiliary.csv", "demo_phases.csv", "demo_summary.json"}) CHECK(fs::exists(dir / f));
}

TEST_CASE("simulate: zero field gives zero phases") {
  const auto dir = fresh_dir("zero");
  auto cfg = demo(dir);
  cfg.trajectory.kind = "static";
  cfg.trajectory.omega0 = 0.0;
  cfg.trajectory.theta = 0.7;
  cfg.initial.mode = "default";
  cfg.integrator.t_end = 3.0;
  const auto res = cmd_simulate(cfg);
  CHECK(res.exit_code == kExitOk);
  for (const auto& p : res.report["phases"]) {
    CHECK(p["phi_dyn"].get<double>() == 0.0);
    CHECK(p["phi_geo"].get<double>() == 0.0);
  }
}

TEST_CASE("simulate: line table with amplitudes") {
  const auto dir = fresh_dir("lines");
  auto cfg = config_for_regime(find_preset("disordered"));
  cfg.output.dir = dir.string();
  const auto res = cmd_simulate(cfg);
  CHECK(res.exit_code == kExitOk);
  const auto lines = json::parse(slurp(dir / "disordered_lines.json"));
  REQUIRE(lines["lines"].size() == 1);
  const auto& line = lines["lines"][0];
  CHECK(line["shift_ev"].get<double>() == doctest::Approx(res.report["analytic"]["spectral_shift_ev"].get<double>()));
  CHECK(line.contains("probability"));
  CHECK(line["first_order_valid"].get<bool>());
}

TEST_CASE("verify") {
  SUBCASE("precession demo passes") {
    const auto dir = fresh_dir("verify_pass");
    const auto res = cmd_verify(demo(dir));
    CHECK(res.exit_code == kExitOk);
    CHECK(res.report["pass"].get<bool>());
    for (const auto& s : res.report["sigma"]) CHECK(s["min_fidelity"].get<double>() >= 1 - 1e-8);
    CHECK(fs::exists(dir / "demo_verify.json"));
    CHECK(fs::exists(dir / "demo_verify_up.csv"));
  }
  SUBCASE("coarse oracle step fails with a convergence study") {
    const auto dir = fresh_dir("verify_fail");
    auto cfg = demo(dir);
    cfg.integrator.step = 0.5;
    cfg.oracle.substeps = 1;
    const auto res = cmd_verify(cfg);
    CHECK(res.exit_code == kExitVerificationFailure);
    CHECK_FALSE(res.report["pass"].get<bool>());
    const auto& study = res.report["convergence"];
    REQUIRE(study.size() == 3);
    CHECK(study[2]["observed_order"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fs::exists(dir / "demo_verify.json"));
  }
  SUBCASE("static field agrees to rounding") {
    const auto dir = fresh_dir("verify_static");
    auto cfg = demo(dir);
    cfg.trajectory.kind = "static";
    cfg.trajectory.theta = pi / 3;
    cfg.trajectory.phi0 = 0.2;
    cfg.initial.mode = "default";
    cfg.integrator.t_end = 10.0;
    cfg.oracle.substeps = 1;
    const auto res = cmd_verify(cfg);
    CHECK(res.exit_code == kExitOk);
    for (const auto& s : res.report["sigma"]) {
      CHECK(s["min_fidelity"].get<double>() >= 1 - 1e-12);
      CHECK(s["max_phase_error"].get<double>() < 1e-12);
    }
  }
}

TEST_CASE("sweep") {
  const auto dir = fresh_dir("sweep");
  auto cfg = demo(dir);
  cfg.trajectory.theta = pi / 2;
  cfg.sigma = {SpinProjection::up()};
  cfg.integrator.step = 0.02;
  cfg.sweep = SweepConfig{"Omega_ratio", {1e-1, 1e-2, 1e-3}};

  SUBCASE("Berry limit") {
    const auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].status == "ok");
      CHECK(rows[i].index == i);
      CHECK(rows[i].berry_reference == doctest::Approx(pi));
      if (i > 0) CHECK(rows[i].berry_rel_error < rows[i - 1].berry_rel_error);
    }
    CHECK(rows.back().berry_rel_error < 1e-3);
  }
  SUBCASE("serial and parallel rows are identical") {
    const auto a = run_sweep(cfg, Execution::Serial);
    const auto b = run_sweep(cfg, Execution::Parallel);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].phi_geo_period == b[i].phi_geo_period);
      CHECK(a[i].shift_ev == b[i].shift_ev);
    }
  }
  SUBCASE("empty grid") {
    cfg.sweep->values.clear();
    const auto res = cmd_sweep(cfg);
    CHECK(res.exit_code == kExitOk);
    CHECK(res.report["rows"].get<int>() == 0);
    CHECK(fs::exists(dir / "demo_sweep.csv"));
  }
  SUBCASE("degenerate cone angle is recorded in-row") {
    cfg.sweep = SweepConfig{"theta", {0.0, pi / 2}};
    const auto rows = run_sweep(cfg);
    CHECK(rows[0].status == "no-solution");
    CHECK(rows[1].status == "ok");
    const auto res = cmd_sweep(cfg);
    CHECK(res.exit_code == kExitOk);
    CHECK(res.report["failed_rows"].get<int>() == 1);
  }
  SUBCASE("tabulated trajectories are rejected") {
    cfg.trajectory.kind = "tabulated";
    CHECK_THROWS_AS(run_sweep(cfg), ConfigInvalid);
  }
}

TEST_CASE("scenario export") {
  const auto dir = fresh_dir("scenario");
  for (const auto& [name, w0] : {std::pair{"disordered", 1e11}, std::pair{"ordered", 1e9}}) {
    const auto path = dir / (std::string(name) + ".json");
    const auto res = cmd_scenario(name, path);
    CHECK(res.exit_code == kExitOk);
    const auto cfg = load_config(path);
    CHECK(cfg.trajectory.omega0 == w0);
    CHECK(cfg.scenario == std::string(name));
    CHECK(json::parse(slurp(path))["provenance"]["config_hash"] == config_hash(cfg));
  }
  try {
    cmd_scenario("bogus", dir / "bogus.json");
    FAIL("expected ConfigInvalid");
  } catch (const ConfigInvalid& e) {
    CHECK(std::string(e.what()).find("ordered") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "bogus.json"));
}

TEST_CASE("outputs are deterministic and carry the config hash") {
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  auto ca = config_for_regime(find_preset("disordered"));
  auto cb = ca;
  ca.output.dir = a.string();
  cb.output.dir = b.string();
  ca.sweep = cb.sweep = SweepConfig{"Omega_ratio", {0.5, 1.0, 2.0}};
  cmd_simulate(ca);
  cmd_verify(ca);
  cmd_sweep(ca);
  cmd_simulate(cb);
  cmd_verify(cb);
  cmd_sweep(cb);

  const std::string hash = config_hash(ca);
  CHECK(config_hash(cb) == hash);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const auto name = entry.path().filename();
    const std::string text = slurp(entry.path());
    CHECK_MESSAGE(bool(text == slurp(b / name)), name.string());
    CHECK_MESSAGE(bool(text.find(hash) != std::string::npos), name.string());
    if (entry.path().extension() == ".csv") CHECK(bool(text.rfind("# config_hash: " + hash, 0) == 0));
  }
  CHECK(files >= 9);
}
