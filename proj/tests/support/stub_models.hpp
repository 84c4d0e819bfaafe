#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "repurchase/model.hpp"

namespace repurchase::fixtures {

/// Positive-class probability given by an arbitrary function of the row.
class FunctionModel final : public ProbabilisticModel {
public:
    explicit FunctionModel(std::function<double(std::span<const double>)> fn) : fn_(std::move(fn)) {}
    [[nodiscard]] double predict_positive(std::span<const double> row) const override { return fn_(row); }
    [[nodiscard]] std::string model_type() const override { return "function"; }

private:
    std::function<double(std::span<const double>)> fn_;
};

inline std::shared_ptr<const ProbabilisticModel> constant_model(double p) {
    return std::make_shared<FunctionModel>([p](std::span<const double>) { return p; });
}

inline std::shared_ptr<const ProbabilisticModel> failing_model() {
    return std::make_shared<FunctionModel>([](std::span<const double>) -> double {
        throw std::runtime_error("feature count mismatch");
    });
}

}  // namespace repurchase::fixtures
