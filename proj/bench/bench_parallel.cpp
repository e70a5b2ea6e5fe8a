// Serial reference vs OpenMP paths for the two batch kernels: the detuning
// scan and the parameter sweep.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "lrphase/commands.hpp"
#include "lrphase/config.hpp"
#include "lrphase/invariant.hpp"
#include "lrphase/phase.hpp"
#include "lrphase/spectroscopy.hpp"

using namespace lrphase;

namespace {

struct ScanFixture {
  AuxiliarySeries aux;
  PhaseSeries up, down;
  std::vector<EnergyLevel> levels;
  PerturbationModel pert;
  std::vector<double> nus;

  ScanFixture() {
    const double w0 = 1e11, W = 1.595e11, th = std::numbers::pi / 2;
    const auto tr = OmegaTrajectory::constant_precession(w0, W, th);
    const double rate = spectral_shift_rate(SpinProjection::up(), SpinProjection::down(), w0, W, th);
    aux = integrate_auxiliary(tr, {solve_precession_lambda(w0, W, th), 0.0}, 200 * 2 * std::numbers::pi / rate,
                              2 * std::numbers::pi / W / 400);
    up = accumulate_phases(aux, tr, SpinProjection::up());
    down = accumulate_phases(aux, tr, SpinProjection::down());
    const StateLabel from{0, SpinProjection::up()}, to{0, SpinProjection::down()};
    levels = {{from, 0.0}, {to, 0.0}};
    pert = PerturbationModel({{to, from, {1e-7, 0.0}}}, TimeProfile::MonochromaticDrive, 0.0,
                             PerturbationFrame::Invariant);
    for (int k = 0; k < 200; ++k) nus.push_back(rate * (0.95 + 0.1 * k / 199.0));
  }
};

const ScanFixture& scan_fixture() {
  static const ScanFixture f;
  return f;
}

void detuning_scan_bench(benchmark::State& state, Execution exec) {
  const auto& f = scan_fixture();
  const TransitionContext ctx{&f.aux, &f.up, &f.down};
  const StateLabel from{0, SpinProjection::up()}, to{0, SpinProjection::down()};
  for (auto _ : state) {
    benchmark::DoNotOptimize(detuning_scan(f.pert, f.levels, from, to, ctx, f.nus, exec));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(f.nus.size()));
}

RunConfig sweep_config() {
  RunConfig cfg;
  cfg.trajectory.omega0 = 1.0;
  cfg.trajectory.theta = std::numbers::pi / 2;
  cfg.initial.mode = "precession";
  cfg.sigma = {SpinProjection::up()};
  cfg.integrator.step = 0.02;
  SweepConfig sw{"Omega_ratio", {}};
  for (int i = 0; i < 16; ++i) sw.values.push_back(std::pow(10.0, -1.0 - 2.0 * i / 15.0));
  cfg.sweep = sw;
  return cfg;
}

void sweep_bench(benchmark::State& state, Execution exec) {
  const auto cfg = sweep_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg, exec));
  state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.sweep->values.size()));
}

}  // namespace

BENCHMARK_CAPTURE(detuning_scan_bench, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(detuning_scan_bench, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep_bench, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sweep_bench, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
