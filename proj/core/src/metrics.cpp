#include "repurchase/metrics.hpp"

namespace repurchase {

Confusion confusion(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size()) {
        throw InvalidArgument("confusion: " + std::to_string(labels.size()) + " labels vs " +
                              std::to_string(predictions.size()) + " predictions");
    }
    Confusion c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i], p = predictions[i];
        if ((y != 0 && y != 1) || (p != 0 && p != 1)) throw InvalidArgument("confusion: values must be 0 or 1");
        if (y == 1) {
            (p == 1 ? c.tp : c.fn) += 1;
        } else {
            (p == 1 ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

EvalReport prf1(const Confusion& c) {
    EvalReport r;
    r.counts = c;
    if (c.tp + c.fp > 0) {
        r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        r.precision_undefined = true;
    }
    if (c.tp + c.fn > 0) {
        r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        r.recall_undefined = true;
    }
    if (r.precision + r.recall > 0.0) {
        // P = R gives F1 = P exactly; the general formula can miss by an ulp.
        r.f1 = r.precision == r.recall ? r.precision : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    } else {
        r.f1_undefined = true;
    }
    return r;
}

EvalReport evaluate(const ProbabilisticModel& model, const Dataset& data, double threshold) {
    validate_dataset(data);
    std::vector<int> predictions(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        predictions[i] = model.predict_positive(data.x.row(i)) >= threshold ? 1 : 0;
    }
    return prf1(confusion(data.y, predictions));
}

RepeatedEval repeated_eval(const ProbabilisticModel& model, const Dataset& positives, const Dataset& negatives,
                           std::size_t n_rounds, std::uint64_t seed, double threshold) {
    if (positives.size() == 0 || negatives.size() == 0) throw InvalidArgument("both test pools must be non-empty");
    if (n_rounds == 0) throw InvalidArgument("repeated evaluation needs at least one round");
    // Each pool member is scored once; resampling only reweights the fixed predictions.
    auto predict_pool = [&](const Dataset& pool) {
        std::vector<int> out(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            out[i] = model.predict_positive(pool.x.row(i)) >= threshold ? 1 : 0;
        }
        return out;
    };
    const auto pos_pred = predict_pool(positives);
    const auto neg_pred = predict_pool(negatives);

    RepeatedEval out;
    for (std::size_t r = 0; r < n_rounds; ++r) {
        SplitMix64 rng(mix_seed(seed, r));
        Confusion c;
        for (std::size_t k = 0; k < positives.size(); ++k) {
            (pos_pred[rng.below(positives.size())] == 1 ? c.tp : c.fn) += 1;
        }
        for (std::size_t k = 0; k < negatives.size(); ++k) {
            (neg_pred[rng.below(negatives.size())] == 1 ? c.fp : c.tn) += 1;
        }
        EvalReport rep = prf1(c);
        if (rep.precision_undefined) out.flags.push_back("round " + std::to_string(r) + ": precision undefined (TP+FP=0)");
        if (rep.recall_undefined) out.flags.push_back("round " + std::to_string(r) + ": recall undefined (TP+FN=0)");
        if (rep.f1_undefined) out.flags.push_back("round " + std::to_string(r) + ": F1 undefined (P+R=0)");
        out.mean_precision += rep.precision;
        out.mean_recall += rep.recall;
        out.mean_f1 += rep.f1;
        out.rounds.push_back(rep);
    }
    const auto n = static_cast<double>(n_rounds);
    out.mean_precision /= n;
    out.mean_recall /= n;
    out.mean_f1 /= n;
    return out;
}

nlohmann::ordered_json report_json(const RepeatedEval& report) {
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const auto& r : report.rounds) {
        rounds.push_back({{"TP", r.counts.tp},
                          {"FP", r.counts.fp},
                          {"TN", r.counts.tn},
                          {"FN", r.counts.fn},
                          {"P", r.precision},
                          {"R", r.recall},
                          {"F1", r.f1}});
    }
    nlohmann::ordered_json j;
    j["rounds"] = rounds;
    j["mean"] = {{"P", report.mean_precision}, {"R", report.mean_recall}, {"F1", report.mean_f1}};
    j["flags"] = report.flags;
    return j;
}

std::string report_to_json(const RepeatedEval& report, int indent) { return report_json(report).dump(indent); }

}  // namespace repurchase
