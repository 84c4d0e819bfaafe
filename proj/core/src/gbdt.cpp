#include "repurchase/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/presort.hpp"

namespace repurchase {

double sigmoid(double raw) noexcept {
    if (raw >= 0.0) return 1.0 / (1.0 + std::exp(-raw));
    const double e = std::exp(raw);
    return e / (1.0 + e);
}

double logistic_loss(int label, double raw_score) noexcept {
    return std::max(raw_score, 0.0) - static_cast<double>(label) * raw_score + std::log1p(std::exp(-std::abs(raw_score)));
}

GradHess grad_hess(int label, double raw_score) {
    if (label != 0 && label != 1) throw InvalidArgument("label must be 0 or 1");
    if (!std::isfinite(raw_score)) throw InvalidArgument("raw score must be finite");
    const double p = sigmoid(raw_score);
    return {p - static_cast<double>(label), p * (1.0 - p)};
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
    const double denom = hess_sum + lambda;
    if (!(denom > 0.0)) throw InvalidArgument("leaf weight needs H + lambda > 0");
    return -grad_sum / denom;
}

double leaf_objective(double grad_sum, double hess_sum, double lambda, double weight) noexcept {
    return grad_sum * weight + 0.5 * (hess_sum + lambda) * weight * weight;
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda,
                  double gamma) {
    const double g = grad_left + grad_right;
    const double h = hess_left + hess_right;
    return 0.5 * (grad_left * grad_left / (hess_left + lambda) + grad_right * grad_right / (hess_right + lambda) -
                  g * g / (h + lambda)) -
           gamma;
}

void GossParams::validate() const {
    if (!(top_rate > 0.0 && top_rate < 1.0)) throw InvalidArgument("GOSS top rate a must lie in (0, 1)");
    if (!(other_rate > 0.0 && other_rate <= 1.0 - top_rate + 1e-12)) {
        throw InvalidArgument("GOSS other rate b must lie in (0, 1 - a]");
    }
}

GossSample goss_sample(std::span<const double> abs_gradients, const GossParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n = abs_gradients.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t top = std::min(n, ceil_fraction(params.top_rate, n));
    auto larger = [&](std::size_t a, std::size_t b) {
        return abs_gradients[a] > abs_gradients[b] || (abs_gradients[a] == abs_gradients[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(), larger);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), larger);
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(top), order.end());

    GossSample out;
    out.top_count = top;
    out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top));
    out.weights.assign(top, 1.0);

    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top), order.end());
    const std::size_t sampled = std::min(rest.size(), ceil_fraction(params.other_rate, n));
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < sampled; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(rest.size() - i));
        std::swap(rest[i], rest[j]);
    }
    const double amp = params.amplification();
    for (std::size_t i = 0; i < sampled; ++i) {
        out.indices.push_back(rest[i]);
        out.weights.push_back(amp);
    }
    return out;
}

double goss_variance_gain(double top_left_sum, double sampled_left_sum, double n_left, double top_right_sum,
                          double sampled_right_sum, double n_right, double n_total, const GossParams& params) {
    const double amp = params.amplification();
    const double left = top_left_sum + amp * sampled_left_sum;
    const double right = top_right_sum + amp * sampled_right_sum;
    return (left * left / n_left + right * right / n_right) / n_total;
}

void BoostParams::validate() const {
    if (n_trees < 0) throw InvalidArgument("n_trees must be >= 0");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw InvalidArgument("learning_rate must lie in (0, 1]");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
    if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
    if (!(min_child_weight >= 0.0)) throw InvalidArgument("min_child_weight must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidArgument("subsample must lie in (0, 1]");
    if (max_leaves < 0 || max_leaves == 1) throw InvalidArgument("max_leaves must be 0 (depth-wise) or >= 2");
    if (max_leaves == 0 && max_depth < 0) throw InvalidArgument("depth-wise growth needs max_depth >= 0");
    if (goss) goss->validate();
}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidArgument("a tree needs at least one node");
}

std::size_t RegressionTree::leaf_index(std::span<const double> row) const {
    std::size_t id = 0;
    while (!nodes_[id].is_leaf()) {
        const Node& n = nodes_[id];
        id = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return id;
}

double RegressionTree::predict(std::span<const double> row) const { return nodes_[leaf_index(row)].value; }

std::size_t RegressionTree::leaf_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += node.is_leaf() ? 1 : 0;
    return n;
}

BoostedModel::BoostedModel(double base_score, std::vector<RegressionTree> trees, BoostParams params)
    : base_score_(base_score), trees_(std::move(trees)), params_(std::move(params)) {}

double BoostedModel::raw_score(std::span<const double> row) const {
    double s = base_score_;
    for (const auto& tree : trees_) s += params_.learning_rate * tree.predict(row);
    return s;
}

double BoostedModel::predict_positive(std::span<const double> row) const {
    if (!all_finite(row)) throw InvalidArgument("boosted prediction requires finite features");
    return sigmoid(raw_score(row));
}

namespace {

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

class BoostTreeBuilder {
public:
    BoostTreeBuilder(const detail::Presorted& data, std::span<const double> grad, std::span<const double> hess,
                     std::span<const double> weights, const BoostParams& params)
        : data_(data), grad_(grad), hess_(hess), weights_(weights), params_(params), lists_(data, weights) {}

    RegressionTree build() {
        nodes_.clear();
        const std::size_t n = lists_.size();
        if (params_.max_leaves > 0) {
            grow_leafwise(n);
        } else {
            grow_depthwise(0, n, 0);
        }
        return RegressionTree(std::move(nodes_));
    }

private:
    struct Sums {
        double g = 0.0;
        double h = 0.0;
    };

    Sums sums(std::size_t begin, std::size_t end) const {
        Sums s;
        for (std::uint32_t row : lists_.segment(0, begin, end)) {
            s.g += weights_[row] * grad_[row];
            s.h += weights_[row] * hess_[row];
        }
        return s;
    }

    std::optional<Split> find_split(std::size_t begin, std::size_t end, const Sums& total) const {
        std::optional<Split> best;
        for (std::size_t f = 0; f < data_.d; ++f) {
            const auto seg = lists_.segment(f, begin, end);
            double gl = 0.0, hl = 0.0;
            for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
                const std::uint32_t row = seg[k];
                gl += weights_[row] * grad_[row];
                hl += weights_[row] * hess_[row];
                const double v = data_.value(f, row);
                const double v_next = data_.value(f, seg[k + 1]);
                if (!(v < v_next)) continue;
                const double gr = total.g - gl;
                const double hr = total.h - hl;
                if (hl < params_.min_child_weight || hr < params_.min_child_weight) continue;
                const double gain = split_gain(gl, hl, gr, hr, params_.lambda, params_.gamma);
                if (!best || gain > best->gain) best = Split{f, detail::midpoint_threshold(v, v_next), gain};
            }
        }
        if (best && best->gain > 0.0) return best;
        return std::nullopt;
    }

    std::int32_t make_leaf(const Sums& s) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        RegressionTree::Node leaf;
        leaf.value = leaf_weight(s.g, s.h, params_.lambda);
        nodes_.push_back(leaf);
        return id;
    }

    std::int32_t grow_depthwise(std::size_t begin, std::size_t end, int depth) {
        const Sums s = sums(begin, end);
        std::optional<Split> split;
        if (depth < params_.max_depth && end - begin >= 2) split = find_split(begin, end, s);
        if (!split) return make_leaf(s);
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        const std::size_t mid = lists_.partition(begin, end, split->feature, split->threshold);
        const std::int32_t left = grow_depthwise(begin, mid, depth + 1);
        const std::int32_t right = grow_depthwise(mid, end, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(id)];
        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    void grow_leafwise(std::size_t n) {
        struct Leaf {
            std::int32_t node;
            std::size_t begin, end;
            int depth;
            Sums sums;
            std::optional<Split> split;
        };
        auto evaluate = [&](Leaf& leaf) {
            const bool depth_ok = params_.max_depth < 0 || leaf.depth < params_.max_depth;
            if (depth_ok && leaf.end - leaf.begin >= 2) leaf.split = find_split(leaf.begin, leaf.end, leaf.sums);
        };

        std::vector<Leaf> open;
        Leaf root{make_leaf(sums(0, n)), 0, n, 0, sums(0, n), std::nullopt};
        evaluate(root);
        open.push_back(root);
        std::size_t leaves = 1;
        while (leaves < static_cast<std::size_t>(params_.max_leaves)) {
            // Highest gain first; earlier-created leaf wins ties.
            std::optional<std::size_t> pick;
            for (std::size_t i = 0; i < open.size(); ++i) {
                if (!open[i].split) continue;
                if (!pick || open[i].split->gain > open[*pick].split->gain ||
                    (open[i].split->gain == open[*pick].split->gain && open[i].node < open[*pick].node)) {
                    pick = i;
                }
            }
            if (!pick) break;
            Leaf leaf = open[*pick];
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(*pick));
            const std::size_t mid = lists_.partition(leaf.begin, leaf.end, leaf.split->feature, leaf.split->threshold);
            Leaf left{0, leaf.begin, mid, leaf.depth + 1, sums(leaf.begin, mid), std::nullopt};
            Leaf right{0, mid, leaf.end, leaf.depth + 1, sums(mid, leaf.end), std::nullopt};
            left.node = make_leaf(left.sums);
            right.node = make_leaf(right.sums);
            auto& parent = nodes_[static_cast<std::size_t>(leaf.node)];
            parent.feature = static_cast<std::int32_t>(leaf.split->feature);
            parent.threshold = leaf.split->threshold;
            parent.left = left.node;
            parent.right = right.node;
            parent.value = 0.0;
            evaluate(left);
            evaluate(right);
            open.push_back(left);
            open.push_back(right);
            ++leaves;
        }
    }

    const detail::Presorted& data_;
    std::span<const double> grad_, hess_, weights_;
    const BoostParams& params_;
    detail::NodeLists lists_;
    std::vector<RegressionTree::Node> nodes_;
};

std::vector<double> row_weights(std::size_t n, std::span<const double> grad, const BoostParams& params,
                                std::size_t iteration) {
    std::vector<double> weights(n, 0.0);
    const std::uint64_t seed = mix_seed(params.seed, iteration);
    if (params.goss) {
        std::vector<double> abs_g(grad.begin(), grad.end());
        for (auto& v : abs_g) v = std::abs(v);
        const GossSample sample = goss_sample(abs_g, *params.goss, seed);
        for (std::size_t k = 0; k < sample.indices.size(); ++k) weights[sample.indices[k]] = sample.weights[k];
        return weights;
    }
    if (params.subsample >= 1.0) {
        std::fill(weights.begin(), weights.end(), 1.0);
        return weights;
    }
    const std::size_t keep = std::max<std::size_t>(1, ceil_fraction(params.subsample, n));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
        weights[idx[i]] = 1.0;
    }
    return weights;
}

double mean_loss(std::span<const int> labels, std::span<const double> raw) {
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) sum += logistic_loss(labels[i], raw[i]);
    return sum / static_cast<double>(labels.size());
}

}  // namespace

BoostedModel fit_boosted(const Dataset& data, const BoostParams& params, std::vector<double>* train_loss) {
    validate_dataset(data);
    params.validate();
    const std::size_t n = data.size();
    const std::size_t positives = data.count_label(1);
    if (positives == 0 || positives == n) throw InvalidArgument("boosting needs both classes present");

    const double rate = static_cast<double>(positives) / static_cast<double>(n);
    const double base_score = std::log(rate / (1.0 - rate));
    std::vector<double> raw(n, base_score);
    std::vector<double> grad(n), hess(n);
    if (train_loss) {
        train_loss->clear();
        train_loss->push_back(mean_loss(data.y, raw));
    }

    const auto presorted = detail::Presorted::build(data.x);
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (std::size_t iter = 0; iter < static_cast<std::size_t>(params.n_trees); ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            const GradHess gh = grad_hess(data.y[i], raw[i]);
            grad[i] = gh.g;
            hess[i] = gh.h;
        }
        const auto weights = row_weights(n, grad, params, iter);
        BoostTreeBuilder builder(presorted, grad, hess, weights, params);
        RegressionTree tree = builder.build();
        for (std::size_t i = 0; i < n; ++i) raw[i] += params.learning_rate * tree.predict(data.x.row(i));
        const double loss = mean_loss(data.y, raw);
        if (!std::isfinite(loss)) {
            throw Error("boosting diverged: non-finite training loss at iteration " + std::to_string(iter + 1));
        }
        if (train_loss) train_loss->push_back(loss);
        trees.push_back(std::move(tree));
    }
    return BoostedModel(base_score, std::move(trees), params);
}

}  // namespace repurchase
