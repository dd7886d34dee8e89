#include <benchmark/benchmark.h>

#include <cmath>

#include "loglaw/meanfield.hpp"
#include "loglaw/stats.hpp"
#include "loglaw/transfer.hpp"

using namespace loglaw;

namespace {

void BM_WDistance(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto f = GridDensity::from_function(n, [](double x) { return 1.0 + 0.5 * std::cos(kTwoPi * x); });
  auto g = GridDensity::lebesgue(n);
  for (auto _ : state) benchmark::DoNotOptimize(w_distance(f, g, n));
}
BENCHMARK(BM_WDistance)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_UlamExact(benchmark::State& state) {
  auto map = ExpandingCircleMap(2, 0.05).as_circle_map();
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ulam(map, n).nonzeros());
}
BENCHMARK(BM_UlamExact)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Push(benchmark::State& state) {
  auto P = ulam(ExpandingCircleMap(2, 0.05).as_circle_map(), 4096);
  auto f = GridDensity::lebesgue(4096);
  for (auto _ : state) f = push(P, f);
  benchmark::DoNotOptimize(f.total_mass());
}
BENCHMARK(BM_Push);

void BM_SolenoidOrbit(benchmark::State& state) {
  SolenoidFamily family;
  Orbit orbit(family, solenoid_point(0.1, 0.0, 0.0), {kShadowJitter, 1});
  for (auto _ : state) benchmark::DoNotOptimize(orbit.advance());
}
BENCHMARK(BM_SolenoidOrbit);

void BM_HittingTimes(benchmark::State& state) {
  AutonomousCircleFamily family(ExpandingCircleMap(2, 0.0));
  RadiiSchedule radii(0x1.0p-5, 0.5, 8);
  auto rs = radii.radii();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SplitMix64 rng(seed++);
    auto x0 = circle_point(uniform01(rng));
    benchmark::DoNotOptimize(hitting_times(family, x0, circle_point(0.618), rs, 1'000'000, {kShadowJitter, rng()}));
  }
}
BENCHMARK(BM_HittingTimes);

void BM_SctStepDensity(benchmark::State& state) {
  MeanFieldSystem system(MeanFieldConfig(ExpandingCircleMap(2, 0.05), Coupling::sine(), 0.05,
                                         DensityRepresentation{static_cast<std::size_t>(state.range(0))}));
  system.base_operator();
  GlobalState s{GridDensity::from_function(system.n_cells(),
                                           [](double x) { return 1.0 + 0.3 * std::cos(kTwoPi * x); }),
                0};
  for (auto _ : state) s = sct_step(s, system);
  benchmark::DoNotOptimize(s.time);
}
BENCHMARK(BM_SctStepDensity)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_SctStepParticles(benchmark::State& state) {
  MeanFieldSystem system(MeanFieldConfig(ExpandingCircleMap(2, 0.05), Coupling::sine(), 0.05,
                                         ParticleRepresentation{100000}));
  SplitMix64 rng(1);
  std::vector<PhasePoint> pts(100000);
  for (auto& p : pts) p = circle_point(uniform01(rng));
  GlobalState s{EmpiricalMeasure::uniform(PhaseSpace::circle, pts), 0};
  for (auto _ : state) s = sct_step(s, system);
  benchmark::DoNotOptimize(s.time);
}
BENCHMARK(BM_SctStepParticles)->Unit(benchmark::kMillisecond);

void BM_LocalDimension(benchmark::State& state) {
  SolenoidFamily family;
  auto cloud = equilibrium_cloud(family, 200000, 50, 3);
  auto y = cloud.points()[17];
  RadiiSchedule radii(0x1.0p-5, 0.5, 6);
  for (auto _ : state) benchmark::DoNotOptimize(local_dimension(cloud, y, radii).slope);
}
BENCHMARK(BM_LocalDimension)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
