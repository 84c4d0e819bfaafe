#include <benchmark/benchmark.h>

#include "repurchase/gbdt.hpp"
#include "test_data.hpp"

using namespace repurchase;

namespace {

const Dataset& data() {
    static const Dataset d = fixtures::gaussian_blobs(10000, 10000, 0.5, 1);
    return d;
}

}  // namespace

static void BM_BoostDepthwise(benchmark::State& state) {
    BoostParams p;
    p.n_trees = 50;
    p.max_depth = 6;
    for (auto _ : state) benchmark::DoNotOptimize(fit_boosted(data(), p));
}
BENCHMARK(BM_BoostDepthwise)->Unit(benchmark::kMillisecond);

// Arg 0 grows leaf-wise on every row; arg 1 adds one-side sampling.
static void BM_BoostLeafwise(benchmark::State& state) {
    BoostParams p;
    p.n_trees = 50;
    p.max_leaves = 31;
    p.max_depth = -1;
    if (state.range(0)) p.goss = GossParams{};
    for (auto _ : state) benchmark::DoNotOptimize(fit_boosted(data(), p));
}
BENCHMARK(BM_BoostLeafwise)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_GossSample(benchmark::State& state) {
    std::vector<double> g(static_cast<std::size_t>(state.range(0)));
    SplitMix64 rng(4);
    for (auto& v : g) v = rng.uniform();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(goss_sample(g, GossParams{}, seed++));
}
BENCHMARK(BM_GossSample)->Arg(10000)->Arg(100000);
