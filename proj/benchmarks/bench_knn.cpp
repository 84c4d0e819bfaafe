#include <benchmark/benchmark.h>

#include "repurchase/resample.hpp"
#include "test_data.hpp"

using namespace repurchase;

static void BM_KnnBuild(benchmark::State& state) {
    const auto d = fixtures::gaussian_blobs(static_cast<std::size_t>(state.range(0)), 0, 0.0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(KnnIndex(d.x));
}
BENCHMARK(BM_KnnBuild)->Arg(1000)->Arg(30000)->Unit(benchmark::kMillisecond);

static void BM_KnnQuery(benchmark::State& state) {
    const auto d = fixtures::gaussian_blobs(static_cast<std::size_t>(state.range(0)), 0, 0.0, 2);
    const KnnIndex index(d.x);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.neighbors_of(i, 5));
        i = (i + 1) % index.size();
    }
}
BENCHMARK(BM_KnnQuery)->Arg(1000)->Arg(30000);

static void BM_SmoteEnn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = fixtures::gaussian_blobs(n, n / 20, 1.5, 3);
    for (auto _ : state) benchmark::DoNotOptimize(smote_enn_standardized(d, SmoteParams{}, EnnParams{}));
}
BENCHMARK(BM_SmoteEnn)->Arg(2000)->Arg(16000)->Unit(benchmark::kMillisecond);
