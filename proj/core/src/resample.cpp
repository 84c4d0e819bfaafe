#include "repurchase/resample.hpp"

#include <algorithm>
#include <queue>
#include <utility>

#include "repurchase/features.hpp"

namespace repurchase {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

KnnIndex::KnnIndex(Matrix points, std::size_t leaf_size) : points_(std::move(points)), leaf_size_(leaf_size) {
    if (points_.rows() < 2) throw InvalidArgument("knn index needs at least 2 points");
    if (leaf_size_ == 0) leaf_size_ = 1;
    order_.resize(points_.rows());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.rows() / leaf_size_ + 1);
    build(0, order_.size());
}

std::int32_t KnnIndex::build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    // Split on the widest coordinate at the median.
    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < points_.cols(); ++d) {
        double lo = points_(order_[begin], d), hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = points_(order_[i], d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                         return points_(a, best_dim) < points_(b, best_dim);
                     });
    const double split = points_(order_[mid], best_dim);
    // Everything left of mid is <= split, everything from mid on is >= split.
    nodes_[id].dim = best_dim;
    nodes_[id].split = split;
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::vector<std::size_t> KnnIndex::search(std::span<const double> point, std::size_t k, std::size_t exclude) const {
    using Entry = std::pair<double, std::size_t>;  // (squared distance, index); max-heap on lexicographic order
    std::priority_queue<Entry> heap;

    auto consider = [&](std::size_t idx) {
        if (idx == exclude) return;
        const Entry e{squared_distance(point, points_.row(idx)), idx};
        if (heap.size() < k) {
            heap.push(e);
        } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
        }
    };

    // Iterative descent; the far child is visited only if its half-space can
    // still hold a point at distance <= the current k-th best.
    std::vector<std::pair<std::int32_t, double>> stack;  // (node, lower bound on squared distance)
    stack.emplace_back(0, 0.0);
    while (!stack.empty()) {
        const auto [id, bound] = stack.back();
        stack.pop_back();
        if (heap.size() == k && bound > heap.top().first) continue;
        const Node& node = nodes_[static_cast<std::size_t>(id)];
        if (node.left < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) consider(order_[i]);
            continue;
        }
        const double diff = point[node.dim] - node.split;
        const double plane = diff * diff;
        const std::int32_t near_child = diff <= 0.0 ? node.left : node.right;
        const std::int32_t far_child = diff <= 0.0 ? node.right : node.left;
        stack.emplace_back(far_child, std::max(bound, plane));
        stack.emplace_back(near_child, bound);
    }

    std::vector<std::size_t> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top().second;
        heap.pop();
    }
    return out;
}

std::vector<std::size_t> KnnIndex::nearest(std::span<const double> point, std::size_t k) const {
    if (point.size() != points_.cols()) throw InvalidArgument("query dimension does not match index");
    if (k > size()) {
        throw InvalidArgument("k=" + std::to_string(k) + " exceeds the " + std::to_string(size()) + " indexed points");
    }
    return search(point, k, static_cast<std::size_t>(-1));
}

std::vector<std::size_t> KnnIndex::neighbors_of(std::size_t index, std::size_t k) const {
    if (index >= size()) throw InvalidArgument("neighbor query for out-of-range index");
    if (k > size() - 1) {
        throw InvalidArgument("k=" + std::to_string(k) + " exceeds the " + std::to_string(size() - 1) +
                              " other points");
    }
    return search(points_.row(index), k, index);
}

void interpolate(std::span<const double> base, std::span<const double> neighbor, double u, std::span<double> out) {
    for (std::size_t d = 0; d < base.size(); ++d) {
        const double y = base[d] + u * (neighbor[d] - base[d]);
        out[d] = std::clamp(y, std::min(base[d], neighbor[d]), std::max(base[d], neighbor[d]));
    }
}

SmoteOutput smote_generate(const Matrix& minority, const SmoteParams& params, std::size_t count) {
    if (params.k_neighbors < 1) throw InvalidArgument("SMOTE k_neighbors must be >= 1");
    if (minority.rows() <= params.k_neighbors) {
        throw InvalidArgument("SMOTE needs more minority rows (" + std::to_string(minority.rows()) +
                              ") than k_neighbors (" + std::to_string(params.k_neighbors) +
                              "); use a smaller k_neighbors");
    }
    SmoteOutput out;
    out.points = Matrix(count, minority.cols());
    out.origins.reserve(count);
    if (count == 0) return out;

    const KnnIndex index(minority);
    const std::size_t m = minority.rows();
    std::vector<std::vector<std::size_t>> neighbor_cache(std::min(m, count));
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t base = s % m;
        auto& neighbors = neighbor_cache[base];
        if (neighbors.empty()) neighbors = index.neighbors_of(base, params.k_neighbors);
        SplitMix64 rng(mix_seed(params.seed, s));
        const std::size_t neighbor = neighbors[rng.below(neighbors.size())];
        double u = rng.uniform_open();
        interpolate(minority.row(base), minority.row(neighbor), u, out.points.row(s));
        out.origins.push_back({base, neighbor, u});
    }
    return out;
}

std::vector<std::size_t> enn_rejected(const Dataset& data, const EnnParams& params) {
    validate_dataset(data);
    if (params.k < 1) throw InvalidArgument("ENN k must be >= 1");
    if (data.size() < params.k + 1) {
        throw InvalidArgument("ENN needs at least k+1 rows (" + std::to_string(params.k + 1) + ")");
    }
    const KnnIndex index(data.x);
    std::vector<std::size_t> rejected;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t opposite = 0;
        for (std::size_t j : index.neighbors_of(i, params.k)) {
            if (data.y[j] != data.y[i]) ++opposite;
        }
        if (2 * opposite > params.k) rejected.push_back(i);
    }
    return rejected;
}

Dataset enn_edit(const Dataset& data, const EnnParams& params) {
    const auto rejected = enn_rejected(data, params);
    std::vector<std::size_t> keep;
    keep.reserve(data.size() - rejected.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (r < rejected.size() && rejected[r] == i) {
            ++r;
        } else {
            keep.push_back(i);
        }
    }
    return data.subset(keep);
}

std::size_t smote_deficit(std::size_t minority, std::size_t majority, double target_ratio) {
    const auto wanted = static_cast<std::size_t>(std::llround(target_ratio * static_cast<double>(majority)));
    return wanted > minority ? wanted - minority : 0;
}

BalancedSet smote_enn(const Dataset& train, const SmoteParams& smote, const EnnParams& enn) {
    validate_dataset(train);
    if (!(smote.target_ratio > 0.0)) throw InvalidArgument("SMOTE target_ratio must be > 0");
    const std::size_t positives = train.count_label(1);
    const std::size_t negatives = train.size() - positives;
    if (positives == 0 || negatives == 0) throw InvalidArgument("SMOTE-ENN needs both classes present");
    const int minority_label = positives <= negatives ? 1 : 0;
    const std::size_t minority_count = std::min(positives, negatives);
    const std::size_t majority_count = std::max(positives, negatives);

    Matrix minority(0, train.x.cols());
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train.y[i] == minority_label) minority.push_row(train.x.row(i));
    }
    const std::size_t needed = smote_deficit(minority_count, majority_count, smote.target_ratio);
    const SmoteOutput synth = smote_generate(minority, smote, needed);

    Dataset combined = train;
    std::vector<std::uint8_t> synthetic(train.size(), 0);
    for (std::size_t s = 0; s < synth.points.rows(); ++s) {
        combined.push_back(synth.points.row(s), minority_label);
        synthetic.push_back(1);
    }

    const auto rejected = enn_rejected(combined, enn);
    BalancedSet out;
    out.generated = needed;
    out.removed = rejected.size();
    out.data.x = Matrix(0, train.x.cols());
    std::size_t r = 0;
    for (std::size_t i = 0; i < combined.size(); ++i) {
        if (r < rejected.size() && rejected[r] == i) {
            ++r;
            continue;
        }
        out.data.push_back(combined.x.row(i), combined.y[i]);
        out.synthetic.push_back(synthetic[i]);
        out.source.push_back(i);
    }
    return out;
}

BalancedSet smote_enn_standardized(const Dataset& train, const SmoteParams& smote, const EnnParams& enn) {
    const Standardizer scaler = Standardizer::fit(train.x);
    const Dataset scaled{scaler.transform(train.x), train.y};
    BalancedSet balanced = smote_enn(scaled, smote, enn);
    const Matrix raw = scaler.inverse_transform(balanced.data.x);
    // Surviving original rows are copied verbatim; only synthetic rows go through the inverse map.
    for (std::size_t i = 0; i < balanced.data.size(); ++i) {
        const auto src = balanced.source[i];
        const auto values = src < train.size() ? train.x.row(src) : raw.row(i);
        std::copy(values.begin(), values.end(), balanced.data.x.row(i).begin());
    }
    return balanced;
}

}  // namespace repurchase
