#include "repurchase/ensemble.hpp"

#include "repurchase/common.hpp"

namespace repurchase {

VotingEnsemble::VotingEnsemble(std::vector<VotingMember> members, double threshold)
    : members_(std::move(members)), threshold_(threshold) {
    if (members_.size() < 2) throw InvalidArgument("soft voting needs at least 2 members");
    for (const auto& m : members_) {
        if (!m.model) throw InvalidArgument("voting member '" + m.name + "' has no model");
    }
    if (!(threshold_ > 0.0 && threshold_ < 1.0)) throw InvalidArgument("voting threshold must lie in (0, 1)");
}

double VotingEnsemble::soft_vote(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& m : members_) {
        try {
            sum += m.model->predict_positive(row);
        } catch (const std::exception& e) {
            throw Error("voting member '" + m.name + "' failed: " + e.what());
        }
    }
    return sum / static_cast<double>(members_.size());
}

}  // namespace repurchase
