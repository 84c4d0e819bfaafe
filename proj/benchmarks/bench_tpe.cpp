#include <benchmark/benchmark.h>

#include "repurchase/tpe.hpp"

using namespace repurchase;

static void BM_Suggest(benchmark::State& state) {
    const SearchSpace space({Dimension::integer("n_trees", 1, 500), Dimension::integer("max_depth", 10, 30),
                             Dimension::categorical("criterion", {"gini", "entropy"}),
                             Dimension::integer("max_features", 1, 5)});
    std::vector<Trial> history;
    SplitMix64 rng(1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
        Trial t;
        t.index = i;
        t.config = space.sample_uniform(rng);
        t.objective = t.config.values[0] / 500.0 + rng.uniform() * 0.1;
        history.push_back(t);
    }
    const TpeParams params;
    for (auto _ : state) benchmark::DoNotOptimize(suggest(history, space, params, rng));
}
BENCHMARK(BM_Suggest)->Arg(10)->Arg(100);
