#include <benchmark/benchmark.h>

#include <vector>

#include "ordent/compat.hpp"
#include "ordent/estimators.hpp"
#include "ordent/maps.hpp"
#include "ordent/measures.hpp"
#include "ordent/ordinal.hpp"
#include "ordent/rng.hpp"

using namespace ordent;

static void BM_PatternOf(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<double> w(static_cast<std::size_t>(n));
    std::uint64_t i = 0;
    for (auto _ : state) {
        for (auto& x : w) x = counter_uniform(1, 2, i++);
        benchmark::DoNotOptimize(pattern_of(w));
    }
}
BENCHMARK(BM_PatternOf)->Arg(4)->Arg(8)->Arg(12);

static void BM_EmpiricalDistribution(benchmark::State& state) {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    for (auto _ : state) {
        auto d = empirical_pattern_distribution(map, leb, 8, 100'000, 7);
        benchmark::DoNotOptimize(d.total);
    }
}
BENCHMARK(BM_EmpiricalDistribution)->Unit(benchmark::kMillisecond);

static void BM_GaussPreimage(benchmark::State& state) {
    auto gauss = make_gauss(static_cast<int>(state.range(0)));
    auto a = normalize({Interval::half_open(0.2, 0.7)});
    for (auto _ : state) {
        auto pre = gauss.preimage(a);
        benchmark::DoNotOptimize(pre.resolved.size());
    }
}
BENCHMARK(BM_GaussPreimage)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ExactRate(benchmark::State& state) {
    auto map = make_doubling();
    auto leb = make_measure("lebesgue");
    auto m = map.monotony_partition();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto est = partition_entropy_rate_estimate(map, leb, m, n);
        benchmark::DoNotOptimize(est.value);
    }
}
BENCHMARK(BM_ExactRate)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_CompatWord(benchmark::State& state) {
    auto tent = make_tent();
    auto leb = make_measure("lebesgue");
    CylinderIndex w{1, 1, 0, 1, 1};
    for (auto _ : state) {
        auto rep = compatible_patterns_exact(tent, leb, w);
        benchmark::DoNotOptimize(rep.count);
    }
}
BENCHMARK(BM_CompatWord)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
