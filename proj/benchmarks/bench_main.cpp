#include <benchmark/benchmark.h>

#include "rankone/diagnostics.hpp"
#include "rankone/fixtures.hpp"
#include "rankone/melnikov.hpp"

using namespace rankone;

static void BM_integrate_cubic(benchmark::State& st) {
  const VectorFieldSpec f = fixtures::cubic(0.0);
  for (auto _ : st) benchmark::DoNotOptimize(integrate(f, {0.35, 0.35, 0.0}, {0.0, 20.0}, 1e-12).back());
}
BENCHMARK(BM_integrate_cubic)->Unit(benchmark::kMillisecond);

static void BM_map_F(benchmark::State& st) {
  const ASParams p;
  ASState s{0.5, 1.0};
  for (auto _ : st) {
    s = map_F(s, p);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_map_F);

static void BM_lyapunov(benchmark::State& st) {
  const Map2D m = as_map(ASParams{});
  for (auto _ : st) benchmark::DoNotOptimize(lyapunov(m, {0.5, 1.0}, st.range(0), 1000).lambda1);
}
BENCHMARK(BM_lyapunov)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_compute_ACS(benchmark::State& st) {
  const auto gl = fixtures::glued_loop();
  HomoclinicOrbit o = compute_homoclinic(gl.field, locate_saddle(gl.field, {0.01, -0.02}), 0.05, 1e-9);
  frames_and_E(o, gl.field);
  for (auto _ : st) benchmark::DoNotOptimize(compute_ACS(o, gl.field, 5.0).A);
}
BENCHMARK(BM_compute_ACS)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
