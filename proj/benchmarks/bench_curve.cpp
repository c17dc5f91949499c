#include <benchmark/benchmark.h>

#include "hjmm/curve.hpp"
#include "hjmm/rng.hpp"

namespace {

hjmm::ForwardCurve make_curve(std::size_t cells) {
  auto grid = hjmm::CurveGrid::uniform(5.0 / static_cast<double>(cells), cells);
  hjmm::RandomSource rs(hjmm::StreamKey{7, 0, 0});
  return hjmm::sample_curve(grid, 0.5, [&](double z) { return 0.03 + 0.002 * rs.normal() * z; });
}

void BM_NormBeta(benchmark::State& state) {
  auto h = make_curve(static_cast<std::size_t>(state.range(0)));
  hjmm::BetaMetric metric(h.grid, h.beta);
  for (auto _ : state) benchmark::DoNotOptimize(metric.norm(h));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormBeta)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Antiderivative(benchmark::State& state) {
  auto h = make_curve(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hjmm::antiderivative(h));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Antiderivative)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
