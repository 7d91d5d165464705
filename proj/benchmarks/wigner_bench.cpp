#include <benchmark/benchmark.h>

#include "stratwave/hermite_wigner.hpp"

static void BM_WignerCertified(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double xi2 = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(stratwave::wigner_g(n, 0.7, xi2));
}
BENCHMARK(BM_WignerCertified)->Args({0, 1})->Args({10, 1})->Args({40, 1})->Args({40, 6});

static void BM_WignerFixed(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stratwave::wigner_g_fixed(20, 0.7, 2.0, nodes));
}
BENCHMARK(BM_WignerFixed)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
