#include <benchmark/benchmark.h>

#include "powermarket/powermarket.hpp"

namespace pm = powermarket;

static void BM_InverseCdf(benchmark::State& state) {
    pm::Rng rng(7);
    for (auto _ : state) benchmark::DoNotOptimize(pm::inverse_cdf(10.0, 200.0, -0.15, rng.uniform01()));
}
BENCHMARK(BM_InverseCdf);

static void BM_RunningStatsPush(benchmark::State& state) {
    pm::Rng rng(11);
    pm::RunningStats stats;
    std::uint64_t step = 0;
    for (auto _ : state) stats.push(++step, 30.0 + rng.uniform01());
    benchmark::DoNotOptimize(stats.mean());
}
BENCHMARK(BM_RunningStatsPush);

static void BM_BuildPopulation(benchmark::State& state) {
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(pm::build_population(pm::exp_preset(), ++seed));
}
BENCHMARK(BM_BuildPopulation)->Unit(benchmark::kMillisecond);

static void BM_Session(benchmark::State& state) {
    const pm::Population pop =
        pm::build_population(state.range(0) == 0 ? pm::exp_preset() : pm::lin_preset(), 3);
    std::uint64_t seed = 100;
    for (auto _ : state) benchmark::DoNotOptimize(pm::run_session(pop, ++seed));
}
BENCHMARK(BM_Session)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Intersection(benchmark::State& state) {
    const pm::Population pop = pm::build_population(pm::exp_preset(), 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            pm::intersection(pm::demand_curve(pop.buyers), pm::supply_curve(pop.sellers)));
}
BENCHMARK(BM_Intersection)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
