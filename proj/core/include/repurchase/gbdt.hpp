#pragma once

// Second-order gradient boosting for binary logistic loss. One engine covers
// both depth-wise growth with row subsampling ("XGBoost-style") and
// leaf-wise growth with gradient-based one-side sampling ("LightGBM-style").

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repurchase/common.hpp"
#include "repurchase/model.hpp"

namespace repurchase {

struct GradHess {
    double g = 0.0;
    double h = 0.0;
};

double sigmoid(double raw) noexcept;

/// Binary logistic loss log(1 + e^s) - y s, evaluated stably.
double logistic_loss(int label, double raw_score) noexcept;

/// g = p - y, h = p (1 - p) with p = sigmoid(raw_score).
GradHess grad_hess(int label, double raw_score);

/// Minimizer of G w + (H + lambda) w^2 / 2.
double leaf_weight(double grad_sum, double hess_sum, double lambda);

/// Per-leaf part of the regularized second-order objective:
/// G w + (H + lambda) w^2 / 2 (the complexity term is constant per leaf).
double leaf_objective(double grad_sum, double hess_sum, double lambda, double weight) noexcept;

/// Objective reduction from splitting a leaf, minus the per-leaf penalty:
/// 1/2 [Gl^2/(Hl+l) + Gr^2/(Hr+l) - (Gl+Gr)^2/(Hl+Hr+l)] - gamma.
double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda,
                  double gamma);

struct GossParams {
    double top_rate = 0.2;    // a: fraction kept by largest |g|
    double other_rate = 0.1;  // b: fraction of all rows sampled from the rest

    void validate() const;
    /// (1 - a) / b, applied to sampled small-gradient rows.
    [[nodiscard]] double amplification() const noexcept { return (1.0 - top_rate) / other_rate; }
};

struct GossSample {
    std::vector<std::size_t> indices;  // top set first, then the sampled set
    std::vector<double> weights;       // parallel to indices
    std::size_t top_count = 0;
};

/// Keeps the ceil(a n) rows with largest |g| (ties to the lower index) and a
/// uniform draw of ceil(b n) rows from the remainder (capped at its size).
GossSample goss_sample(std::span<const double> abs_gradients, const GossParams& params, std::uint64_t seed);

/// Variance gain of a split on a GOSS sample: sums over the top set (A) and
/// the sampled set (B) on each side, B amplified by (1 - a) / b.
double goss_variance_gain(double top_left_sum, double sampled_left_sum, double n_left, double top_right_sum,
                          double sampled_right_sum, double n_right, double n_total, const GossParams& params);

struct BoostParams {
    int n_trees = 100;
    double learning_rate = 0.1;
    /// Depth cap; -1 means unlimited (only meaningful with max_leaves > 0).
    int max_depth = 6;
    /// 0 grows depth-wise; a positive value grows best-first up to this many leaves.
    int max_leaves = 0;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;  // minimum hessian sum per child
    double subsample = 1.0;         // plain row sampling, ignored when goss is set
    std::optional<GossParams> goss;
    std::uint64_t seed = 0;

    void validate() const;
};

class RegressionTree {
public:
    struct Node {
        std::int32_t feature = -1;
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        double value = 0.0;  // leaf weight

        [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    RegressionTree() = default;
    explicit RegressionTree(std::vector<Node> nodes);

    [[nodiscard]] double predict(std::span<const double> row) const;
    [[nodiscard]] std::size_t leaf_index(std::span<const double> row) const;
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t leaf_count() const;

    bool operator==(const RegressionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

class BoostedModel final : public ProbabilisticModel {
public:
    BoostedModel() = default;
    BoostedModel(double base_score, std::vector<RegressionTree> trees, BoostParams params);

    /// base_score + learning_rate * sum of tree outputs.
    [[nodiscard]] double raw_score(std::span<const double> row) const;
    [[nodiscard]] double predict_positive(std::span<const double> row) const override;
    [[nodiscard]] std::string model_type() const override { return "gbdt"; }

    [[nodiscard]] double base_score() const noexcept { return base_score_; }
    [[nodiscard]] const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    [[nodiscard]] const BoostParams& params() const noexcept { return params_; }

    bool operator==(const BoostedModel& o) const {
        return base_score_ == o.base_score_ && trees_ == o.trees_;
    }

private:
    double base_score_ = 0.0;
    std::vector<RegressionTree> trees_;
    BoostParams params_;
};

/// Fits the boosted ensemble. When `train_loss` is given it receives the mean
/// training log-loss before the first tree and after every tree.
BoostedModel fit_boosted(const Dataset& data, const BoostParams& params, std::vector<double>* train_loss = nullptr);

}  // namespace repurchase
