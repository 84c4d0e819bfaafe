#pragma once

#include <span>
#include <vector>

#include "detail/presort.hpp"
#include "repurchase/cart.hpp"

namespace repurchase::detail {

/// Grows a classification tree over rows with positive weight. Integer
/// weights behave exactly like duplicated rows (used for bootstrap samples).
DecisionTree grow_tree(const Presorted& data, std::span<const int> labels, std::span<const double> weights,
                       const TreeParams& params);

/// Root-node split search with the same feature sampling as grow_tree.
std::optional<SplitCandidate> root_split(const Presorted& data, std::span<const int> labels,
                                         std::span<const double> weights, const TreeParams& params);

}  // namespace repurchase::detail
