#include <numbers>

#include <benchmark/benchmark.h>

#include "cellwave/profile.hpp"
#include "cellwave/solver.hpp"
#include "cellwave/specfun.hpp"
#include "cellwave/spectrum.hpp"

using namespace cellwave;

namespace {

ModelParams reference(double chi) {
    ModelParams p;
    p.M = std::numbers::pi;
    p.chi = chi;
    p.p1 = 6;
    p.force = ActiveForce::hill(2, 1);
    return p;
}

void BM_BesselJ(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bessel_j(m, x));
        x = x < 15 ? x + 0.37 : 0.1;
    }
}
BENCHMARK(BM_BesselJ)->Arg(0)->Arg(3)->Arg(6);

void BM_BesselIComplex(benchmark::State& state) {
    std::complex<double> z(0.5, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(bessel_i(2, z));
}
BENCHMARK(BM_BesselIComplex);

void BM_JPrimeRoots(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(jprime_roots(2, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_JPrimeRoots)->Arg(3)->Arg(8);

void BM_BuildProfile(benchmark::State& state) {
    const auto p = reference(2.9);
    ProfileOptions opts;
    opts.reconstruct = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(build_profile(p, 4.5, 2.7, opts).G_value);
}
BENCHMARK(BM_BuildProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_SolveFixedSpeed(benchmark::State& state) {
    const auto p = reference(2.9);
    for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_V(p, 4.5).c1);
}
BENCHMARK(BM_SolveFixedSpeed)->Unit(benchmark::kMillisecond);

void BM_SolveTravelingWave(benchmark::State& state) {
    const auto p = reference(2.9);
    for (auto _ : state) benchmark::DoNotOptimize(solve_traveling_wave(p).V);
}
BENCHMARK(BM_SolveTravelingWave)->Unit(benchmark::kMillisecond);

void BM_RealEigenvalues(benchmark::State& state) {
    const DispersionParams dp{static_cast<int>(state.range(0)), 1, 1, 1.1};
    for (auto _ : state) benchmark::DoNotOptimize(real_eigenvalues(dp).eigenvalues.size());
}
BENCHMARK(BM_RealEigenvalues)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
