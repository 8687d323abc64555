#include "lsssc/generator.hpp"
#include "lsssc/geometry.hpp"
#include "lsssc/solver.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace lsssc;

namespace {

Dataset dataset(int n, int d, double kappa) {
  GeneratorConfig g;
  g.ambient_dim = n;
  g.dims = {d, d, d};
  g.kappas = {kappa, kappa, kappa};
  g.noise.kind = NoiseKind::Ball;
  g.noise.delta = 0.05;
  g.seed = 1;
  return generate_dataset(g);
}

void BM_SolveSerial(benchmark::State& state) {
  const Dataset d = dataset(static_cast<int>(state.range(0)), 4, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lsssc_serial(d.X, 3.0).C.data());
}

void BM_SolveParallel(benchmark::State& state) {
  const Dataset d = dataset(static_cast<int>(state.range(0)), 4, 5.0);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lsssc(d.X, 3.0).C.data());
}

void BM_RadiiSerial(benchmark::State& state) {
  const Dataset d = dataset(30, static_cast<int>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_r_serial(d.Y, d.truth).r);
}

void BM_RadiiParallel(benchmark::State& state) {
  const Dataset d = dataset(30, static_cast<int>(state.range(0)), 5.0);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_r(d.Y, d.truth).r);
}

}  // namespace

BENCHMARK(BM_SolveSerial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)
    ->ArgsProduct({{50, 100}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_RadiiSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadiiParallel)
    ->ArgsProduct({{2, 3}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
