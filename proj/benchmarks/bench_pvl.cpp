#include <benchmark/benchmark.h>

#include "pvl/evolve.hpp"
#include "pvl/meridional.hpp"
#include "pvl/pressure.hpp"
#include "pvl/quad.hpp"
#include "pvl/synth.hpp"

using namespace pvl;

namespace {

VectorField vortex(int points)
{
    const GridSpec g(2, points, 4.0);
    return radial_vortex_2d(default_vortex_profile(1.0), g).velocity;
}

void BM_PressureFreespace2d(benchmark::State& state)
{
    const auto v = vortex(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(pressure_freespace(v));
}
BENCHMARK(BM_PressureFreespace2d)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PressureFreespace3d(benchmark::State& state)
{
    const GridSpec g(3, static_cast<int>(state.range(0)), 4.0);
    const auto v = generic_field(g, {3, 0.25, 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(pressure_freespace(v));
}
BENCHMARK(BM_PressureFreespace3d)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PlaneIntegral(benchmark::State& state)
{
    const auto v = vortex(static_cast<int>(state.range(0)));
    const auto p = pressure_freespace(v);
    const PressureMultipole far(v);
    const PlaneSpec plane{{0.6, 0.8, 0.0}, {0.12, 0.16, 0.0}};
    for (auto _ : state)
        benchmark::DoNotOptimize(plane_integral(p, plane, far));
}
BENCHMARK(BM_PlaneIntegral)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_MeridionalPressure(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const MeridionalGrid g{n, n, 12.0, 12.0, false};
    const MeridionalBump b{1.5, 0.0, 0.75, 1.0};
    const auto mf = meridional_from_bumps(3, g, std::span<const MeridionalBump>(&b, 1));
    for (auto _ : state)
        benchmark::DoNotOptimize(pressure_meridional(mf));
}
BENCHMARK(BM_MeridionalPressure)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EvolveStep(benchmark::State& state)
{
    const auto s0 = blob_state(GridSpec(2, static_cast<int>(state.range(0)), 4.0), 0.01);
    const double dt = max_stable_step(s0);
    for (auto _ : state)
        benchmark::DoNotOptimize(step(s0, dt));
}
BENCHMARK(BM_EvolveStep)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
