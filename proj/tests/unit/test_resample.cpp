#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "repurchase/features.hpp"
#include "repurchase/resample.hpp"
#include "test_data.hpp"

using namespace repurchase;

namespace {

// Brute-force k nearest by (squared distance, index), optionally excluding one row.
std::vector<std::size_t> brute_knn(const Matrix& pts, std::span<const double> q, std::size_t k,
                                   std::size_t exclude = static_cast<std::size_t>(-1)) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        if (i == exclude) continue;
        double d = 0;
        for (std::size_t f = 0; f < pts.cols(); ++f) d += (pts(i, f) - q[f]) * (pts(i, f) - q[f]);
        all.emplace_back(d, i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < k; ++j) out.push_back(all[j].second);
    return out;
}

}  // namespace

TEST(Knn, LineExamples) {
    const KnnIndex idx(Matrix::from_rows({{0}, {1}, {10}}));
    EXPECT_EQ(idx.neighbors_of(0, 1), (std::vector<std::size_t>{1}));
    EXPECT_EQ(idx.neighbors_of(1, 2), (std::vector<std::size_t>{0, 2}));
    EXPECT_THROW((void)idx.neighbors_of(1, 3), InvalidArgument);
}

TEST(Knn, TieBreaksToLowerIndex) {
    const KnnIndex idx(Matrix::from_rows({{1, 0}, {-1, 0}}));
    const std::vector<double> origin{0, 0};
    EXPECT_EQ(idx.nearest(origin, 1), (std::vector<std::size_t>{0}));
    const KnnIndex rev(Matrix::from_rows({{-1, 0}, {1, 0}}));
    EXPECT_EQ(rev.nearest(origin, 1), (std::vector<std::size_t>{0}));
}

TEST(Knn, MatchesBruteForceWithDuplicates) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = fixtures::lattice_dataset(300, seed, 4);  // many exact duplicates
        const KnnIndex idx(d.x, 4);
        for (std::size_t i = 0; i < d.size(); i += 7) {
            EXPECT_EQ(idx.neighbors_of(i, 5), brute_knn(d.x, d.x.row(i), 5, i));
            EXPECT_EQ(idx.nearest(d.x.row(i), 6), brute_knn(d.x, d.x.row(i), 6));
        }
    }
}

TEST(Smote, InterpolationExamples) {
    std::vector<double> out(2);
    const std::vector<double> a{0, 0}, b{2, 4};
    interpolate(a, b, 0.5, out);
    EXPECT_EQ(out, (std::vector<double>{1, 2}));
    interpolate(a, b, 0.0, out);
    EXPECT_EQ(out, a);
}

TEST(Smote, GeometryCountAndRoundRobin) {
    const auto blobs = fixtures::gaussian_blobs(0, 40, 0.0, 9);
    SmoteParams p;
    p.seed = 17;
    const auto out = smote_generate(blobs.x, p, 1000);
    ASSERT_EQ(out.points.rows(), 1000u);
    ASSERT_EQ(out.origins.size(), 1000u);
    for (std::size_t s = 0; s < 1000; ++s) {
        const auto& o = out.origins[s];
        EXPECT_EQ(o.base, s % 40);
        EXPECT_GT(o.u, 0.0);
        EXPECT_LT(o.u, 1.0);
        const auto nn = brute_knn(blobs.x, blobs.x.row(o.base), 5, o.base);
        EXPECT_NE(std::find(nn.begin(), nn.end(), o.neighbor), nn.end());
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const double lo = std::min(blobs.x(o.base, f), blobs.x(o.neighbor, f));
            const double hi = std::max(blobs.x(o.base, f), blobs.x(o.neighbor, f));
            EXPECT_GE(out.points(s, f), lo);
            EXPECT_LE(out.points(s, f), hi);
        }
    }
    const auto again = smote_generate(blobs.x, p, 1000);
    EXPECT_EQ(again.points, out.points);
}

TEST(Smote, TooFewMinorityRows) {
    SmoteParams p;
    EXPECT_THROW(smote_generate(Matrix::from_rows({{1}, {2}, {3}, {4}, {5}}), p, 3), InvalidArgument);
    p.k_neighbors = 4;
    EXPECT_NO_THROW(smote_generate(Matrix::from_rows({{1}, {2}, {3}, {4}, {5}}), p, 3));
}

TEST(Smote, Deficit) {
    EXPECT_EQ(smote_deficit(50, 1000, 1.0), 950u);
    EXPECT_EQ(smote_deficit(50, 1000, 0.5), 450u);
    EXPECT_EQ(smote_deficit(600, 1000, 0.5), 0u);
}

TEST(Enn, UnanimousLabelsKeepEverything) {
    auto d = fixtures::gaussian_blobs(50, 0, 0.0, 2);
    EXPECT_TRUE(enn_rejected(d, EnnParams{}).empty());
    EXPECT_EQ(enn_edit(d, EnnParams{}).size(), 50u);
}

TEST(Enn, IsolatedPositiveRemoved) {
    Dataset d;
    d.push_back(std::vector<double>{0, 0}, 1);
    const double ring[5][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.7, 0.7}};
    for (const auto& r : ring) d.push_back(std::vector<double>{r[0], r[1]}, 0);
    for (int i = 0; i < 4; ++i) d.push_back(std::vector<double>{10.0 + i, 10.0}, 0);
    const auto rejected = enn_rejected(d, EnnParams{5});
    EXPECT_EQ(rejected, (std::vector<std::size_t>{0}));
    EXPECT_EQ(enn_edit(d, EnnParams{5}).count_label(1), 0u);
}

TEST(Enn, RejectionMatchesBruteForceMajority) {
    const auto d = fixtures::gaussian_blobs(300, 100, 1.0, 4);
    const auto rejected = enn_rejected(d, EnnParams{5});
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto nn = brute_knn(d.x, d.x.row(i), 5, i);
        std::size_t opposite = 0;
        for (auto j : nn) opposite += d.y[j] != d.y[i];
        const bool expect_removed = opposite * 2 > nn.size();
        EXPECT_EQ(std::binary_search(rejected.begin(), rejected.end(), i), expect_removed) << "row " << i;
    }
    EXPECT_THROW(enn_rejected(fixtures::gaussian_blobs(3, 2, 1.0, 1), EnnParams{5}), InvalidArgument);
}

TEST(SmoteEnn, BlobsReachTargetRatio) {
    const auto train = fixtures::gaussian_blobs(1000, 50, 4.0, 8);
    SmoteParams p;
    p.seed = 3;
    const auto out = smote_enn(train, p, EnnParams{});
    EXPECT_EQ(out.generated, 950u);
    const auto pos = out.data.count_label(1);
    EXPECT_GE(pos, 800u);
    EXPECT_LE(pos, 1250u);
    // ENN only deletes: every output row is an original row or a synthetic row.
    EXPECT_EQ(out.data.size() + out.removed, train.size() + out.generated);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!out.synthetic[i]) {
            ASSERT_LT(out.source[i], train.size());
            EXPECT_TRUE(std::equal(out.data.x.row(i).begin(), out.data.x.row(i).end(),
                                   train.x.row(out.source[i]).begin()));
        } else {
            EXPECT_GE(out.source[i], train.size());
            EXPECT_EQ(out.data.y[i], 1);
        }
    }
    const auto again = smote_enn(train, p, EnnParams{});
    EXPECT_EQ(again.data, out.data);
}

TEST(SmoteEnn, BalancedSeparatedFixedPoint) {
    const auto train = fixtures::gaussian_blobs(100, 100, 20.0, 1);
    const auto out = smote_enn(train, SmoteParams{}, EnnParams{});
    EXPECT_EQ(out.generated, 0u);
    EXPECT_EQ(out.removed, 0u);
    EXPECT_EQ(out.data, train);
}

TEST(SmoteEnn, StandardizedKeepsRawOriginals) {
    auto train = fixtures::gaussian_blobs(400, 30, 3.0, 6);
    for (std::size_t i = 0; i < train.size(); ++i) train.x(i, 2) *= 1000.0;  // mixed units
    SmoteParams p;
    p.seed = 1;
    const auto out = smote_enn_standardized(train, p, EnnParams{});
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!out.synthetic[i]) {
            EXPECT_TRUE(std::equal(out.data.x.row(i).begin(), out.data.x.row(i).end(),
                                   train.x.row(out.source[i]).begin()));
        }
    }
    EXPECT_GT(out.data.count_label(1), 300u);
}

TEST(SmoteEnn, SingleClassThrows) {
    EXPECT_THROW(smote_enn(fixtures::gaussian_blobs(20, 0, 0, 1), SmoteParams{}, EnnParams{}), InvalidArgument);
}
