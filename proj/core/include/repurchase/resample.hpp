#pragma once

// Minority oversampling (SMOTE) followed by edited-nearest-neighbour cleaning.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "repurchase/common.hpp"

namespace repurchase {

/// Exact k-nearest-neighbour search under Euclidean distance, backed by a
/// k-d tree. Results are ordered by (distance, row index), so equal
/// distances resolve to the lower index.
class KnnIndex {
public:
    explicit KnnIndex(Matrix points, std::size_t leaf_size = 16);

    /// k nearest members of the index to an arbitrary point.
    [[nodiscard]] std::vector<std::size_t> nearest(std::span<const double> point, std::size_t k) const;
    /// k nearest members to member `index`, excluding the member itself.
    [[nodiscard]] std::vector<std::size_t> neighbors_of(std::size_t index, std::size_t k) const;

    [[nodiscard]] std::size_t size() const noexcept { return points_.rows(); }
    [[nodiscard]] const Matrix& points() const noexcept { return points_; }

private:
    struct Node {
        std::size_t begin = 0, end = 0;  // range into order_
        std::size_t dim = 0;
        double split = 0.0;
        std::int32_t left = -1, right = -1;
    };

    std::int32_t build(std::size_t begin, std::size_t end);
    [[nodiscard]] std::vector<std::size_t> search(std::span<const double> point, std::size_t k,
                                                  std::size_t exclude) const;

    Matrix points_;
    std::size_t leaf_size_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

/// Squared Euclidean distance, summed in coordinate order.
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct SmoteParams {
    std::size_t k_neighbors = 5;
    double target_ratio = 1.0;  // desired minority/majority after oversampling
    std::uint64_t seed = 0;
};

struct EnnParams {
    std::size_t k = 5;
};

/// Provenance of one synthetic point: base row, chosen neighbour row and
/// interpolation factor.
struct SmoteOrigin {
    std::size_t base = 0;
    std::size_t neighbor = 0;
    double u = 0.0;
};

struct SmoteOutput {
    Matrix points;
    std::vector<SmoteOrigin> origins;
};

/// Generates `count` points Y = X_i + u (X_ij - X_i). Bases cycle round-robin
/// over the minority rows; each sample draws from its own seed-derived stream.
SmoteOutput smote_generate(const Matrix& minority, const SmoteParams& params, std::size_t count);

/// Interpolation step of SMOTE with the result clamped into the segment's
/// bounding box (guards against last-bit rounding).
void interpolate(std::span<const double> base, std::span<const double> neighbor, double u, std::span<double> out);

/// Indices of rows whose k-NN majority label (strict majority, self
/// excluded, computed on the unedited set) disagrees with their own label.
std::vector<std::size_t> enn_rejected(const Dataset& data, const EnnParams& params);
/// Removes the rows reported by enn_rejected; survivors keep their order.
Dataset enn_edit(const Dataset& data, const EnnParams& params);

struct BalancedSet {
    Dataset data;
    std::vector<std::uint8_t> synthetic;  // 1 where the row came from SMOTE
    /// Row index in the pre-edit set: originals keep their training index,
    /// synthetic row s is train.size() + s.
    std::vector<std::size_t> source;
    std::size_t generated = 0;
    std::size_t removed = 0;
};

/// Number of synthetic minority rows needed so minority/majority reaches the target.
std::size_t smote_deficit(std::size_t minority, std::size_t majority, double target_ratio);

/// SMOTE on the minority class followed by ENN over the combined set. Rows
/// are used as given (no scaling).
BalancedSet smote_enn(const Dataset& train, const SmoteParams& smote, const EnnParams& enn);

/// smote_enn on z-scored features; the output is mapped back to raw units.
BalancedSet smote_enn_standardized(const Dataset& train, const SmoteParams& smote, const EnnParams& enn);

}  // namespace repurchase
