#pragma once

#include <array>
#include <span>
#include <string>

namespace repurchase {

/// Fitted binary classifier exposing class probabilities. Implementations
/// are immutable after fitting and safe to share across threads.
class ProbabilisticModel {
public:
    virtual ~ProbabilisticModel() = default;

    /// Probability of the positive (repurchase) class.
    [[nodiscard]] virtual double predict_positive(std::span<const double> row) const = 0;

    /// (P(y=0), P(y=1)).
    [[nodiscard]] std::array<double, 2> predict_proba(std::span<const double> row) const {
        const double p = predict_positive(row);
        return {1.0 - p, p};
    }

    [[nodiscard]] virtual std::string model_type() const = 0;
};

}  // namespace repurchase
