#include <benchmark/benchmark.h>

#include "hjmm/simulate.hpp"
#include "hjmm/zoo.hpp"

namespace {

using namespace hjmm;

ModelSpec make_spec(std::size_t cells, bool jumps) {
  ModelParams p;
  p.vol.family = "hull_white";
  p.vol.sigma = 0.01;
  p.vol.kappa = 0.5;
  if (jumps) {
    p.jumps.family = "exp_jump";
    p.jumps.intensity = 2.0;
    p.jumps.mark_size = 0.01;
  }
  const double dz = 5.0 / static_cast<double>(cells);
  return build_model(p, CurveGrid::uniform(dz, cells), 0.5, 1.0, CovarianceSpec{{1.0}});
}

// Single scheme step (transport + drift + diffusion) on a diffusion model.
void BM_StepCurve(benchmark::State& state) {
  auto spec = make_spec(static_cast<std::size_t>(state.range(0)), false);
  ForwardCurve h = constant_curve(spec.grid, spec.beta, 0.03);
  const double dt = spec.grid->uniform_step();
  std::vector<double> dw{0.001};
  for (auto _ : state) {
    h = step_curve(spec, Measure::risk_neutral, h, dw, {}, dt);
    benchmark::DoNotOptimize(h.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepCurve)->Arg(250)->Arg(1250)->Arg(5000);

// Full-path throughput through the parallel driver, diffusion only.
void BM_SimulatePath(benchmark::State& state) {
  auto spec = make_spec(static_cast<std::size_t>(state.range(0)), false);
  SimConfig cfg;
  cfg.n_paths = 4;
  cfg.dt = spec.grid->uniform_step();
  cfg.horizon = 1.0;
  cfg.seed = 11;
  for (auto _ : state) {
    auto res = simulate(spec, cfg);
    benchmark::DoNotOptimize(res.paths.data());
    cfg.seed += 1;  // fresh streams each round
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps());
}
BENCHMARK(BM_SimulatePath)->Arg(250)->Arg(1250)->Unit(benchmark::kMillisecond);

// Same with a finite-activity jump part (arrival sampling + jump application).
void BM_SimulatePathJumps(benchmark::State& state) {
  auto spec = make_spec(static_cast<std::size_t>(state.range(0)), true);
  SimConfig cfg;
  cfg.n_paths = 4;
  cfg.dt = spec.grid->uniform_step();
  cfg.horizon = 1.0;
  cfg.seed = 11;
  for (auto _ : state) {
    auto res = simulate(spec, cfg);
    benchmark::DoNotOptimize(res.paths.data());
    cfg.seed += 1;
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps());
}
BENCHMARK(BM_SimulatePathJumps)->Arg(250)->Arg(1250)->Unit(benchmark::kMillisecond);

// No-arbitrage drift assembly (running integrals + jump compensator).
void BM_DriftXi(benchmark::State& state) {
  auto spec = make_spec(static_cast<std::size_t>(state.range(0)), state.range(1) != 0);
  ForwardCurve h = constant_curve(spec.grid, spec.beta, 0.03);
  for (auto _ : state) benchmark::DoNotOptimize(hjm_drift_xi(spec, h));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DriftXi)->Args({1250, 0})->Args({1250, 1});

}  // namespace

BENCHMARK_MAIN();
