#include <gtest/gtest.h>

#include <random>

#include "repurchase/metrics.hpp"
#include "stub_models.hpp"

using namespace repurchase;

TEST(Confusion, CountsCells) {
    const std::vector<int> y{1, 1, 0, 0, 1, 0};
    const std::vector<int> p{1, 0, 1, 0, 1, 0};
    EXPECT_EQ(confusion(y, p), (Confusion{2, 1, 2, 1}));
    EXPECT_THROW(confusion(y, std::vector<int>{1}), InvalidArgument);
    EXPECT_THROW(confusion(std::vector<int>{2}, std::vector<int>{1}), InvalidArgument);
}

TEST(Prf1, WorkedExample) {
    const auto r = prf1(Confusion{8, 2, 85, 5});
    EXPECT_DOUBLE_EQ(r.precision, 0.8);
    EXPECT_DOUBLE_EQ(r.recall, 8.0 / 13.0);
    EXPECT_DOUBLE_EQ(r.f1, 16.0 / 23.0);
}

TEST(Prf1, MatchesIndependentArithmetic) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> cell(0, 500);
    for (int i = 0; i < 1000; ++i) {
        const Confusion c{cell(rng), cell(rng), cell(rng), cell(rng)};
        const auto r = prf1(c);
        if (c.tp + c.fp == 0 || c.tp + c.fn == 0 || c.tp == 0) continue;
        const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
        const double rec = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        EXPECT_EQ(r.precision, p);
        EXPECT_EQ(r.recall, rec);
        // Harmonic mean equals 2TP / (2TP + FP + FN).
        EXPECT_NEAR(r.f1, 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn), 1e-15);
        EXPECT_LE(r.f1, std::max(p, rec));
        EXPECT_GE(r.f1, std::min(p, rec));
    }
}

TEST(Prf1, EqualPrecisionAndRecallGiveF1) {
    for (std::int64_t k = 1; k < 200; ++k) {
        const auto r = prf1(Confusion{3 * k, k, 17, k});
        ASSERT_EQ(r.precision, r.recall);
        EXPECT_EQ(r.f1, r.precision);
    }
}

TEST(Prf1, UndefinedCasesAreFlagged) {
    const auto none_predicted = prf1(Confusion{0, 0, 10, 3});
    EXPECT_TRUE(none_predicted.precision_undefined);
    EXPECT_FALSE(none_predicted.recall_undefined);
    EXPECT_EQ(none_predicted.precision, 0.0);
    EXPECT_TRUE(none_predicted.f1_undefined);
    const auto no_positives = prf1(Confusion{0, 4, 10, 0});
    EXPECT_TRUE(no_positives.recall_undefined);
    EXPECT_EQ(no_positives.f1, 0.0);
}

TEST(RepeatedEval, DeterministicWithMeanIdentity) {
    Dataset pos{Matrix::from_rows({{0.9}, {0.2}, {0.7}}), {1, 1, 1}};
    Dataset neg{Matrix::from_rows({{0.1}, {0.6}, {0.3}, {0.05}}), {0, 0, 0, 0}};
    const fixtures::FunctionModel model([](std::span<const double> row) { return row[0]; });
    const auto a = repeated_eval(model, pos, neg, 10, 42);
    const auto b = repeated_eval(model, pos, neg, 10, 42);
    EXPECT_EQ(report_to_json(a), report_to_json(b));
    ASSERT_EQ(a.rounds.size(), 10u);
    double f1 = 0.0;
    for (const auto& r : a.rounds) {
        EXPECT_EQ(r.counts.tp + r.counts.fn, 3);
        EXPECT_EQ(r.counts.fp + r.counts.tn, 4);
        f1 += r.f1;
    }
    EXPECT_NEAR(a.mean_f1, f1 / 10.0, 1e-15);
    EXPECT_NE(report_to_json(repeated_eval(model, pos, neg, 10, 43)), report_to_json(a));
}

TEST(RepeatedEval, FlagsAndErrors) {
    Dataset pos{Matrix::from_rows({{0.9}}), {1}};
    Dataset neg{Matrix::from_rows({{0.1}}), {0}};
    const auto report = repeated_eval(*fixtures::constant_model(0.0), pos, neg, 2, 1);
    EXPECT_EQ(report.flags.size(), 4u);  // precision and F1 undefined in both rounds
    const auto j = report_json(report);
    EXPECT_EQ(j.at("rounds").size(), 2u);
    EXPECT_EQ(j.at("flags").size(), 4u);
    EXPECT_THROW(repeated_eval(*fixtures::constant_model(0.5), pos, Dataset{}, 1, 1), InvalidArgument);
    EXPECT_THROW(repeated_eval(*fixtures::constant_model(0.5), pos, neg, 0, 1), InvalidArgument);
}

TEST(Evaluate, ThresholdsProbabilities) {
    Dataset d{Matrix::from_rows({{0.9}, {0.5}, {0.4}, {0.2}}), {1, 0, 1, 0}};
    const fixtures::FunctionModel model([](std::span<const double> row) { return row[0]; });
    const auto r = evaluate(model, d, 0.5);
    EXPECT_EQ(r.counts, (Confusion{1, 1, 1, 1}));
}
