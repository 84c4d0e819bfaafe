#include "repurchase/cart.hpp"

#include <cmath>

#include "detail/cart_builder.hpp"

namespace repurchase {

std::string to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }

Criterion criterion_from_string(const std::string& name) {
    if (name == "gini") return Criterion::gini;
    if (name == "entropy") return Criterion::entropy;
    throw InvalidArgument("unknown split criterion '" + name + "'");
}

double impurity(std::span<const double> class_counts, Criterion criterion) {
    double total = 0.0;
    for (double c : class_counts) {
        if (c < 0.0) throw InvalidArgument("class counts must be nonnegative");
        total += c;
    }
    if (total <= 0.0) throw InvalidArgument("impurity of an empty node is undefined");
    if (criterion == Criterion::gini) {
        double sum_sq = 0.0;
        for (double c : class_counts) {
            const double p = c / total;
            sum_sq += p * p;
        }
        return 1.0 - sum_sq;
    }
    double h = 0.0;
    for (double c : class_counts) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

void TreeParams::validate(std::size_t n_features) const {
    if (max_depth < 0) throw InvalidArgument("max_depth must be >= 0");
    if (max_features < 1 || static_cast<std::size_t>(max_features) > n_features) {
        throw InvalidArgument("max_features must lie in [1, " + std::to_string(n_features) + "]");
    }
    if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
}

namespace detail {
namespace {

struct NodeStats {
    std::array<double, 2> counts{};
    [[nodiscard]] double total() const { return counts[0] + counts[1]; }
};

class CartBuilder {
public:
    CartBuilder(const Presorted& data, std::span<const int> labels, std::span<const double> weights,
                const TreeParams& params)
        : data_(data), labels_(labels), weights_(weights), params_(params), lists_(data, weights) {}

    std::optional<SplitCandidate> find_split(std::size_t begin, std::size_t end, const NodeStats& stats,
                                             std::uint64_t path) const {
        SplitMix64 rng(mix_seed(params_.seed, path));
        const auto features =
            sample_features(data_.d, static_cast<std::size_t>(params_.max_features), rng);
        const double total = stats.total();
        const double parent = impurity(stats.counts, params_.criterion);
        const double min_leaf = static_cast<double>(params_.min_samples_leaf);

        std::optional<SplitCandidate> best;
        for (std::size_t f : features) {
            const auto seg = lists_.segment(f, begin, end);
            std::array<double, 2> left{};
            for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
                const std::uint32_t row = seg[k];
                left[static_cast<std::size_t>(labels_[row])] += weights_[row];
                const double v = data_.value(f, row);
                const double v_next = data_.value(f, seg[k + 1]);
                if (!(v < v_next)) continue;
                const double n_left = left[0] + left[1];
                const double n_right = total - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                const std::array<double, 2> right{stats.counts[0] - left[0], stats.counts[1] - left[1]};
                const double g = (n_left * impurity(left, params_.criterion) +
                                  n_right * impurity(right, params_.criterion)) /
                                 total;
                if (!best || g < best->impurity) best = SplitCandidate{f, midpoint_threshold(v, v_next), g};
            }
        }
        if (best && best->impurity < parent) return best;
        return std::nullopt;
    }

    NodeStats stats(std::size_t begin, std::size_t end) const {
        NodeStats s;
        for (std::uint32_t row : lists_.segment(0, begin, end)) {
            s.counts[static_cast<std::size_t>(labels_[row])] += weights_[row];
        }
        return s;
    }

    std::int32_t grow(std::vector<DecisionTree::Node>& nodes, std::size_t begin, std::size_t end, int depth,
                      std::uint64_t path) {
        const auto id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        const NodeStats s = stats(begin, end);
        const bool pure = s.counts[0] == 0.0 || s.counts[1] == 0.0;
        std::optional<SplitCandidate> split;
        if (depth < params_.max_depth && !pure && s.total() >= 2.0 * params_.min_samples_leaf) {
            split = find_split(begin, end, s, path);
        }
        if (!split) {
            auto& leaf = nodes[static_cast<std::size_t>(id)];
            leaf.counts = {static_cast<std::int64_t>(s.counts[0]), static_cast<std::int64_t>(s.counts[1])};
            return id;
        }
        const std::size_t mid = lists_.partition(begin, end, split->feature, split->threshold);
        const std::int32_t left = grow(nodes, begin, mid, depth + 1, 2 * path);
        const std::int32_t right = grow(nodes, mid, end, depth + 1, 2 * path + 1);
        auto& node = nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    [[nodiscard]] std::size_t active_rows() const { return lists_.size(); }

private:
    const Presorted& data_;
    std::span<const int> labels_;
    std::span<const double> weights_;
    TreeParams params_;
    NodeLists lists_;
};

}  // namespace

DecisionTree grow_tree(const Presorted& data, std::span<const int> labels, std::span<const double> weights,
                       const TreeParams& params) {
    params.validate(data.d);
    CartBuilder builder(data, labels, weights, params);
    if (builder.active_rows() == 0) throw InvalidArgument("cannot fit a tree on zero rows");
    std::vector<DecisionTree::Node> nodes;
    builder.grow(nodes, 0, builder.active_rows(), 0, 1);
    return DecisionTree(std::move(nodes));
}

std::optional<SplitCandidate> root_split(const Presorted& data, std::span<const int> labels,
                                         std::span<const double> weights, const TreeParams& params) {
    params.validate(data.d);
    const CartBuilder builder(data, labels, weights, params);
    const std::size_t n = builder.active_rows();
    if (n < 2) return std::nullopt;
    const NodeStats s = builder.stats(0, n);
    if (s.counts[0] == 0.0 || s.counts[1] == 0.0) return std::nullopt;
    return builder.find_split(0, n, s, 1);
}

}  // namespace detail

std::optional<SplitCandidate> best_split(const Dataset& data, const TreeParams& params) {
    validate_dataset(data);
    const auto presorted = detail::Presorted::build(data.x);
    const std::vector<double> weights(data.size(), 1.0);
    return detail::root_split(presorted, data.y, weights, params);
}

DecisionTree fit_tree(const Dataset& data, const TreeParams& params) {
    validate_dataset(data);
    if (data.size() == 0) throw InvalidArgument("cannot fit a tree on an empty dataset");
    const auto presorted = detail::Presorted::build(data.x);
    const std::vector<double> weights(data.size(), 1.0);
    return detail::grow_tree(presorted, data.y, weights, params);
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidArgument("a tree needs at least one node");
}

const DecisionTree::Node& DecisionTree::leaf_for(std::span<const double> row) const {
    if (!all_finite(row)) throw InvalidArgument("tree prediction requires finite features");
    std::size_t id = 0;
    while (!nodes_[id].is_leaf()) {
        const Node& n = nodes_[id];
        if (static_cast<std::size_t>(n.feature) >= row.size()) throw InvalidArgument("row has too few features");
        id = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[id];
}

double DecisionTree::predict_positive(std::span<const double> row) const {
    const Node& leaf = leaf_for(row);
    const auto total = leaf.counts[0] + leaf.counts[1];
    return static_cast<double>(leaf.counts[1]) / static_cast<double>(total);
}

int DecisionTree::depth() const {
    std::vector<int> depth(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (!nodes_[i].is_leaf()) {
            depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

std::size_t DecisionTree::leaf_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += node.is_leaf() ? 1 : 0;
    return n;
}

}  // namespace repurchase
