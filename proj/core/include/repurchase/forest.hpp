#pragma once

#include <cstdint>
#include <vector>

#include "repurchase/cart.hpp"
#include "repurchase/model.hpp"

namespace repurchase {

struct ForestParams {
    int n_trees = 100;
    TreeParams tree;
    std::uint64_t seed = 0;
    /// Off only for testing: every tree then sees the full training set once.
    bool bootstrap = true;

    void validate() const;
};

/// Seed handed to tree `index`'s split search. Trees are seeded by a counter
/// off the master seed, so growing the forest never reshuffles earlier trees.
std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t index);

/// Bootstrap multiplicities for tree `index` (n draws with replacement).
std::vector<double> bootstrap_weights(std::size_t n, std::uint64_t seed, std::size_t index);

class Forest final : public ProbabilisticModel {
public:
    Forest() = default;
    Forest(std::vector<DecisionTree> trees, ForestParams params);

    /// Mean of the member trees' positive-class probabilities.
    [[nodiscard]] double predict_positive(std::span<const double> row) const override;
    [[nodiscard]] std::string model_type() const override { return "random_forest"; }

    [[nodiscard]] const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    [[nodiscard]] const ForestParams& params() const noexcept { return params_; }

private:
    std::vector<DecisionTree> trees_;
    ForestParams params_;
};

Forest fit_forest(const Dataset& data, const ForestParams& params);

}  // namespace repurchase
