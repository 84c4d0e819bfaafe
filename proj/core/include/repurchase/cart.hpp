#pragma once

// CART classification trees: gini/entropy impurity and the weighted child
// impurity split criterion.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repurchase/common.hpp"
#include "repurchase/model.hpp"

namespace repurchase {

enum class Criterion { gini, entropy };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& name);

/// gini = 1 - sum p^2; entropy = -sum p log2 p (0 log 0 = 0).
double impurity(std::span<const double> class_counts, Criterion criterion);

struct TreeParams {
    int max_depth = 10;
    Criterion criterion = Criterion::gini;
    int max_features = static_cast<int>(kFeatureCount);
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;

    void validate(std::size_t n_features = kFeatureCount) const;
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child impurity, (n_l H_l + n_r H_r) / N
};

/// Best split of the whole dataset treated as a single node. Features are
/// subsampled exactly as fit_tree does at its root. Returns nullopt when no
/// candidate lowers impurity below the node's own.
std::optional<SplitCandidate> best_split(const Dataset& data, const TreeParams& params);

class DecisionTree final : public ProbabilisticModel {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::array<std::int64_t, 2> counts{};  // leaf class counts

        [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes);

    [[nodiscard]] double predict_positive(std::span<const double> row) const override;
    [[nodiscard]] std::string model_type() const override { return "decision_tree"; }

    /// Leaf reached by `row`.
    [[nodiscard]] const Node& leaf_for(std::span<const double> row) const;

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] int depth() const;
    [[nodiscard]] std::size_t leaf_count() const;

    bool operator==(const DecisionTree& o) const { return nodes_ == o.nodes_; }

private:
    std::vector<Node> nodes_;
};

/// Grows a tree depth-first. Stops at max_depth, pure nodes, nodes too small
/// to honour min_samples_leaf, or when no split lowers impurity.
DecisionTree fit_tree(const Dataset& data, const TreeParams& params);

}  // namespace repurchase
