#pragma once

#include <memory>
#include <string>
#include <vector>

#include "repurchase/model.hpp"

namespace repurchase {

struct VotingMember {
    std::string name;
    std::shared_ptr<const ProbabilisticModel> model;
};

/// Equal-weight soft voting over fitted members. The vote is the mean of the
/// members' positive-class probabilities; rows classify positive when the
/// vote reaches the threshold.
class VotingEnsemble final : public ProbabilisticModel {
public:
    explicit VotingEnsemble(std::vector<VotingMember> members, double threshold = 0.5);

    [[nodiscard]] double soft_vote(std::span<const double> row) const;
    [[nodiscard]] int classify(std::span<const double> row) const { return soft_vote(row) >= threshold_ ? 1 : 0; }

    [[nodiscard]] double predict_positive(std::span<const double> row) const override { return soft_vote(row); }
    [[nodiscard]] std::string model_type() const override { return "soft_voting"; }

    [[nodiscard]] double threshold() const noexcept { return threshold_; }
    [[nodiscard]] const std::vector<VotingMember>& members() const noexcept { return members_; }

private:
    std::vector<VotingMember> members_;
    double threshold_;
};

}  // namespace repurchase
