#pragma once

// Exact-greedy split search support shared by the CART and boosting
// builders. Each feature keeps an index list sorted by value; a node owns
// the same [begin, end) range in every list, and splitting a node stably
// partitions that range in all lists. This keeps every node scan linear.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "repurchase/common.hpp"

namespace repurchase::detail {

struct Presorted {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> columns;                    // column-major, d * n
    std::vector<std::vector<std::uint32_t>> order;  // per feature, ascending (value, row)

    [[nodiscard]] double value(std::size_t feature, std::uint32_t row) const { return columns[feature * n + row]; }

    static Presorted build(const Matrix& x) {
        Presorted p;
        p.n = x.rows();
        p.d = x.cols();
        p.columns.resize(p.n * p.d);
        for (std::size_t i = 0; i < p.n; ++i) {
            for (std::size_t f = 0; f < p.d; ++f) p.columns[f * p.n + i] = x(i, f);
        }
        p.order.resize(p.d);
        for (std::size_t f = 0; f < p.d; ++f) {
            auto& ord = p.order[f];
            ord.resize(p.n);
            std::iota(ord.begin(), ord.end(), 0U);
            const double* col = p.columns.data() + f * p.n;
            std::sort(ord.begin(), ord.end(), [col](std::uint32_t a, std::uint32_t b) {
                return col[a] < col[b] || (col[a] == col[b] && a < b);
            });
        }
        return p;
    }
};

class NodeLists {
public:
    /// Keeps rows with positive weight, preserving the presorted order.
    NodeLists(const Presorted& data, std::span<const double> weights)
        : data_(&data), lists_(data.d), mark_(data.n, 0), scratch_(data.n) {
        for (std::size_t f = 0; f < data.d; ++f) {
            auto& list = lists_[f];
            list.reserve(data.n);
            for (std::uint32_t row : data.order[f]) {
                if (weights[row] > 0.0) list.push_back(row);
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return lists_.empty() ? 0 : lists_[0].size(); }

    [[nodiscard]] std::span<const std::uint32_t> segment(std::size_t feature, std::size_t begin,
                                                         std::size_t end) const {
        return {lists_[feature].data() + begin, end - begin};
    }

    /// Sends rows with x[feature] <= threshold left. Returns the boundary
    /// index: [begin, mid) is the left child, [mid, end) the right child.
    std::size_t partition(std::size_t begin, std::size_t end, std::size_t feature, double threshold) {
        std::size_t n_left = 0;
        for (std::size_t k = begin; k < end; ++k) {
            const std::uint32_t row = lists_[feature][k];
            const bool left = data_->value(feature, row) <= threshold;
            mark_[row] = left ? 1 : 0;
            n_left += left ? 1 : 0;
        }
        for (auto& list : lists_) {
            std::size_t l = begin, r = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const std::uint32_t row = list[k];
                if (mark_[row]) {
                    list[l++] = row;
                } else {
                    scratch_[r++] = row;
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r),
                      list.begin() + static_cast<std::ptrdiff_t>(l));
        }
        return begin + n_left;
    }

private:
    const Presorted* data_;
    std::vector<std::vector<std::uint32_t>> lists_;
    std::vector<std::uint8_t> mark_;
    std::vector<std::uint32_t> scratch_;
};

/// Threshold between two consecutive distinct sorted values.
inline double midpoint_threshold(double lo, double hi) {
    const double mid = (lo + hi) / 2.0;
    return mid < hi ? mid : lo;
}

/// Picks `count` distinct feature indices out of `d`, returned ascending.
template <typename Rng>
std::vector<std::size_t> sample_features(std::size_t d, std::size_t count, Rng& rng) {
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    count = std::min(count, d);
    if (count < d) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
            std::swap(all[i], all[j]);
        }
        all.resize(count);
        std::sort(all.begin(), all.end());
    }
    return all;
}

}  // namespace repurchase::detail
