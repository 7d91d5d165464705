#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>

#include "stratwave/oscillatory_quadrature.hpp"

namespace {

// Plane wave over the unit ball of R^p in spherical shell coordinates.
stratwave::OscIntegral plane_wave(int p, double t) {
  stratwave::IntegrationDomain dom;
  stratwave::Shell ball;
  ball.dim = p;
  ball.center.assign(p, 0.0);
  dom.shells.push_back(ball);
  return stratwave::make_integral(
      dom, [](std::span<const double> x) { return x[0]; }, [](std::span<const double>) { return std::complex<double>(1.0); },
      t);
}

}  // namespace

static void BM_PlaneWave(benchmark::State& state) {
  auto integral = plane_wave(static_cast<int>(state.range(0)), static_cast<double>(state.range(1)));
  long long nodes = 0;
  for (auto _ : state) {
    auto r = stratwave::integrate(integral);
    nodes = r.nodes_used;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_PlaneWave)->Args({1, 10})->Args({2, 10})->Args({2, 100})->Args({3, 10})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
