#include "repurchase/forest.hpp"

#include "detail/cart_builder.hpp"

namespace repurchase {

void ForestParams::validate() const {
    if (n_trees < 1 || n_trees > 500) throw InvalidArgument("n_trees must lie in [1, 500]");
    tree.validate();
}

std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t index) { return mix_seed(seed, 2 * index + 1); }

std::vector<double> bootstrap_weights(std::size_t n, std::uint64_t seed, std::size_t index) {
    std::vector<double> weights(n, 0.0);
    SplitMix64 rng(mix_seed(seed, 2 * index));
    for (std::size_t draw = 0; draw < n; ++draw) weights[rng.below(n)] += 1.0;
    return weights;
}

Forest::Forest(std::vector<DecisionTree> trees, ForestParams params)
    : trees_(std::move(trees)), params_(std::move(params)) {
    if (trees_.empty()) throw InvalidArgument("a forest needs at least one tree");
}

double Forest::predict_positive(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_positive(row);
    return sum / static_cast<double>(trees_.size());
}

Forest fit_forest(const Dataset& data, const ForestParams& params) {
    validate_dataset(data);
    params.validate();
    if (data.size() < 2) throw InvalidArgument("forest needs at least 2 rows");
    if (data.count_label(1) == 0 || data.count_label(0) == 0) {
        throw InvalidArgument("forest training data must contain both classes");
    }
    const auto presorted = detail::Presorted::build(data.x);
    const std::vector<double> all_ones(data.size(), 1.0);
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (std::size_t t = 0; t < static_cast<std::size_t>(params.n_trees); ++t) {
        TreeParams tp = params.tree;
        tp.seed = forest_tree_seed(params.seed, t);
        if (params.bootstrap) {
            const auto weights = bootstrap_weights(data.size(), params.seed, t);
            trees.push_back(detail::grow_tree(presorted, data.y, weights, tp));
        } else {
            trees.push_back(detail::grow_tree(presorted, data.y, all_ones, tp));
        }
    }
    return Forest(std::move(trees), params);
}

}  // namespace repurchase
