#pragma once

// Versioned JSON model envelopes.
//   random_forest: {model_type, version, params, trees:[{nodes:[...]}]}
//   gbdt:          {model_type, version, params, base_score, trees:[{nodes:[...]}]}
//   soft_voting:   {model_type, version, threshold, members:[{name, model}]}

#include <filesystem>
#include <memory>

#include <nlohmann/json.hpp>

#include "repurchase/cart.hpp"
#include "repurchase/ensemble.hpp"
#include "repurchase/forest.hpp"
#include "repurchase/gbdt.hpp"

namespace repurchase {

inline constexpr int kModelFormatVersion = 1;

using Json = nlohmann::ordered_json;

Json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const Json& j);

Json forest_params_to_json(const ForestParams& p);
ForestParams forest_params_from_json(const Json& j);
Json boost_params_to_json(const BoostParams& p);
BoostParams boost_params_from_json(const Json& j);

Json model_to_json(const ProbabilisticModel& model);
std::shared_ptr<const ProbabilisticModel> model_from_json(const Json& j);

void save_model(const ProbabilisticModel& model, const std::filesystem::path& path);
std::shared_ptr<const ProbabilisticModel> load_model(const std::filesystem::path& path);

}  // namespace repurchase
