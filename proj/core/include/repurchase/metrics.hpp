#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "repurchase/common.hpp"
#include "repurchase/model.hpp"

namespace repurchase {

/// Binary confusion counts; positive = repurchase = 1.
struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    [[nodiscard]] std::int64_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const int> labels, std::span<const int> predictions);

/// Precision P = TP/(TP+FP), recall R = TP/(TP+FN), F1 = 2PR/(P+R).
/// Zero denominators yield 0 and set the matching flag.
struct EvalReport {
    Confusion counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

EvalReport prf1(const Confusion& c);

/// Classifies rows with `model` at `threshold` and scores them.
EvalReport evaluate(const ProbabilisticModel& model, const Dataset& data, double threshold = 0.5);

struct RepeatedEval {
    std::vector<EvalReport> rounds;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f1 = 0.0;
    std::vector<std::string> flags;
};

/// Each round draws, with replacement, |positives| rows from the positive
/// pool and |negatives| rows from the negative pool, then scores the model.
RepeatedEval repeated_eval(const ProbabilisticModel& model, const Dataset& positives, const Dataset& negatives,
                           std::size_t n_rounds, std::uint64_t seed, double threshold = 0.5);

/// {"rounds":[{TP,FP,TN,FN,P,R,F1}...],"mean":{P,R,F1},"flags":[...]}
nlohmann::ordered_json report_json(const RepeatedEval& report);
std::string report_to_json(const RepeatedEval& report, int indent = 2);

}  // namespace repurchase
