#include <benchmark/benchmark.h>

#include "grasswalk/hypergroup.hpp"
#include "grasswalk/polynomials.hpp"
#include "grasswalk/rng.hpp"
#include "grasswalk/walk.hpp"

using namespace grasswalk;

static void BM_OrbitSum(benchmark::State& state) {
  const auto lambda = make_weight({static_cast<int>(state.range(0)), 4, 2});
  const std::vector<double> x{0.9, 0.5, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(orbit_sum_eval(lambda, x));
}
BENCHMARK(BM_OrbitSum)->Arg(8)->Arg(24);

static void BM_BasisBuild(benchmark::State& state) {
  const auto params = ModelParams::make(1, 3, 2);
  const int cap = static_cast<int>(state.range(0));
  const auto grid = make_grid(2, default_nodes_per_axis(params.k(), cap), params.k());
  for (auto _ : state) {
    JacobiBasis basis(params, cap, grid);
    benchmark::DoNotOptimize(basis.size());
  }
}
BENCHMARK(BM_BasisBuild)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_LinearizationRow(benchmark::State& state) {
  const auto params = ModelParams::make(1, 3, 2);
  const auto lambda = make_weight({8, 4});
  const auto mu = make_weight({6, 2});
  Hypergroup warm(params, 24);  // keeps the shared basis cached
  for (auto _ : state) {
    state.PauseTiming();
    Hypergroup hg(params, 24);
    state.ResumeTiming();
    benchmark::DoNotOptimize(hg.row(lambda, mu).raw_sum);
  }
}
BENCHMARK(BM_LinearizationRow)->Unit(benchmark::kMicrosecond);

static void BM_WalkStep(benchmark::State& state) {
  const auto params = ModelParams::make(1, 3, 2);
  const auto nu = parse_measure("2,0:0.5;2,2:0.5", 2);
  const auto grid = make_grid(2, default_nodes_per_axis(params.k(), 32), params.k());
  Rng rng = make_stream(1, 0);
  const Weight from = make_weight({10, 4});
  benchmark::DoNotOptimize(step(from, nu, params, grid, rng));
  for (auto _ : state) benchmark::DoNotOptimize(step(from, nu, params, grid, rng));
}
BENCHMARK(BM_WalkStep);

static void BM_Simulate(benchmark::State& state) {
  WalkConfig config{ModelParams::make(1, 1, 1), parse_measure("2:1", 1), 200, 1000, 3};
  config.degree_cap = 160;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(config).max_first);
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
