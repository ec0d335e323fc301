#include <benchmark/benchmark.h>

#include <cmath>

#include "runclust/allan.hpp"
#include "runclust/rng.hpp"
#include "runclust/runs.hpp"
#include "runclust/surrogates.hpp"
#include "runclust/synth.hpp"

using namespace runclust;

namespace {

MarkedPointProcess poisson_events(std::int64_t n) {
  SynthSpec spec;
  spec.kind = PoissonLaw{1.0 / 3600.0};
  spec.window = 3600.0 * static_cast<double>(n);
  spec.seed = 1;
  spec.dt = 600;
  return generate(spec);
}

SampledSeries noise_series(std::size_t n) {
  Rng rng(2);
  std::vector<double> v(n);
  double x = 0;
  for (auto& s : v) {
    x = 0.9 * x + rng.exponential(1.0);
    s = x;
  }
  return SampledSeries("B", 0, 600, std::move(v), std::vector<bool>(n, false));
}

void BM_ExtractRuns(benchmark::State& state) {
  const auto series = noise_series(static_cast<std::size_t>(state.range(0)));
  const auto threshold = compute_threshold(series, 0.95);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_runs(series, threshold));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractRuns)->Arg(52560)->Arg(525960);

void BM_AllanCurve(benchmark::State& state) {
  const auto pp = poisson_events(state.range(0));
  const auto grid = default_tau_grid(pp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(af_curve(pp, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AllanCurve)->Arg(1000)->Arg(25000);

void BM_SurrogateSweep(benchmark::State& state) {
  const auto pp = poisson_events(state.range(0));
  const auto grid = default_tau_grid(pp);
  SurrogateConfig config;
  config.n_surrogates = 100;
  config.seed = 3;
  config.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(surrogate_bands(pp, grid, config));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SurrogateSweep)->Arg(1000)->Arg(25000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
