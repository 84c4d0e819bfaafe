#include <benchmark/benchmark.h>

#include "repurchase/forest.hpp"
#include "test_data.hpp"

using namespace repurchase;

static void BM_BestSplit(benchmark::State& state) {
    const auto d = fixtures::gaussian_blobs(state.range(0) / 2, state.range(0) / 2, 0.5, 1);
    TreeParams p;
    for (auto _ : state) benchmark::DoNotOptimize(best_split(d, p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BestSplit)->Arg(1000)->Arg(10000);

static void BM_FitTree(benchmark::State& state) {
    const auto d = fixtures::gaussian_blobs(state.range(0) / 2, state.range(0) / 2, 0.5, 2);
    TreeParams p;
    p.max_depth = 11;
    p.max_features = 3;
    for (auto _ : state) benchmark::DoNotOptimize(fit_tree(d, p));
}
BENCHMARK(BM_FitTree)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_FitForest(benchmark::State& state) {
    const auto d = fixtures::gaussian_blobs(1000, 1000, 0.5, 3);
    ForestParams p;
    p.n_trees = static_cast<int>(state.range(0));
    p.tree.max_depth = 11;
    p.tree.max_features = 3;
    for (auto _ : state) benchmark::DoNotOptimize(fit_forest(d, p));
}
BENCHMARK(BM_FitForest)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
