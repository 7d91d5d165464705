#include <benchmark/benchmark.h>

#include <vector>

#include "stratwave/hermite_wigner.hpp"

static void BM_HermiteSingle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double xi = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stratwave::hermite(n, xi));
    xi += 1e-9;
  }
}
BENCHMARK(BM_HermiteSingle)->Arg(0)->Arg(10)->Arg(60)->Arg(200);

static void BM_HermiteAllOrders(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto& H = stratwave::default_hermite();
  std::vector<double> out(n + 1);
  for (auto _ : state) {
    H.evaluate_all(n, 1.7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * (n + 1));
}
BENCHMARK(BM_HermiteAllOrders)->Arg(60)->Arg(200);

static void BM_Laguerre(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stratwave::wigner_g_laguerre(n, 1.1, -0.4));
}
BENCHMARK(BM_Laguerre)->Arg(5)->Arg(40);

BENCHMARK_MAIN();
