#include "repurchase/model_io.hpp"

#include <fstream>

namespace repurchase {

namespace {

void check_envelope(const Json& j, const std::string& type) {
    if (!j.is_object() || j.value("model_type", "") != type) {
        throw InvalidArgument("expected a '" + type + "' model envelope");
    }
    const int version = j.value("version", 0);
    if (version != kModelFormatVersion) {
        throw InvalidArgument("unsupported " + type + " model version " + std::to_string(version));
    }
}

Json regression_tree_to_json(const RegressionTree& tree) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes()) {
        if (n.is_leaf()) {
            nodes.push_back({{"value", n.value}});
        } else {
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
        }
    }
    return Json{{"nodes", nodes}};
}

RegressionTree regression_tree_from_json(const Json& j) {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& n : j.at("nodes")) {
        RegressionTree::Node node;
        if (n.contains("value")) {
            node.value = n.at("value").get<double>();
        } else {
            node.feature = n.at("feature").get<std::int32_t>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<std::int32_t>();
            node.right = n.at("right").get<std::int32_t>();
        }
        nodes.push_back(node);
    }
    return RegressionTree(std::move(nodes));
}

}  // namespace

Json tree_to_json(const DecisionTree& tree) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes()) {
        if (n.is_leaf()) {
            nodes.push_back({{"counts", {n.counts[0], n.counts[1]}}});
        } else {
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
        }
    }
    return Json{{"version", kModelFormatVersion}, {"nodes", nodes}};
}

DecisionTree tree_from_json(const Json& j) {
    std::vector<DecisionTree::Node> nodes;
    for (const auto& n : j.at("nodes")) {
        DecisionTree::Node node;
        if (n.contains("counts")) {
            node.counts = {n.at("counts").at(0).get<std::int64_t>(), n.at("counts").at(1).get<std::int64_t>()};
        } else {
            node.feature = n.at("feature").get<std::int32_t>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<std::int32_t>();
            node.right = n.at("right").get<std::int32_t>();
        }
        nodes.push_back(node);
    }
    return DecisionTree(std::move(nodes));
}

Json forest_params_to_json(const ForestParams& p) {
    return Json{{"n_trees", p.n_trees},
                {"max_depth", p.tree.max_depth},
                {"criterion", to_string(p.tree.criterion)},
                {"max_features", p.tree.max_features},
                {"min_samples_leaf", p.tree.min_samples_leaf},
                {"bootstrap", p.bootstrap},
                {"seed", p.seed}};
}

ForestParams forest_params_from_json(const Json& j) {
    ForestParams p;
    p.n_trees = j.value("n_trees", p.n_trees);
    p.tree.max_depth = j.value("max_depth", p.tree.max_depth);
    p.tree.criterion = criterion_from_string(j.value("criterion", std::string("gini")));
    p.tree.max_features = j.value("max_features", p.tree.max_features);
    p.tree.min_samples_leaf = j.value("min_samples_leaf", p.tree.min_samples_leaf);
    p.bootstrap = j.value("bootstrap", p.bootstrap);
    p.seed = j.value("seed", p.seed);
    return p;
}

Json boost_params_to_json(const BoostParams& p) {
    Json j{{"n_trees", p.n_trees},
           {"learning_rate", p.learning_rate},
           {"max_depth", p.max_depth},
           {"max_leaves", p.max_leaves},
           {"lambda", p.lambda},
           {"gamma", p.gamma},
           {"min_child_weight", p.min_child_weight},
           {"subsample", p.subsample},
           {"seed", p.seed}};
    if (p.goss) {
        j["goss"] = {{"a", p.goss->top_rate}, {"b", p.goss->other_rate}};
    } else {
        j["goss"] = nullptr;
    }
    return j;
}

BoostParams boost_params_from_json(const Json& j) {
    BoostParams p;
    p.n_trees = j.value("n_trees", p.n_trees);
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.max_leaves = j.value("max_leaves", p.max_leaves);
    p.lambda = j.value("lambda", p.lambda);
    p.gamma = j.value("gamma", p.gamma);
    p.min_child_weight = j.value("min_child_weight", p.min_child_weight);
    p.subsample = j.value("subsample", p.subsample);
    p.seed = j.value("seed", p.seed);
    if (j.contains("goss") && !j.at("goss").is_null()) {
        const auto& g = j.at("goss");
        p.goss = GossParams{g.value("a", 0.2), g.value("b", 0.1)};
    }
    return p;
}

Json model_to_json(const ProbabilisticModel& model) {
    if (const auto* forest = dynamic_cast<const Forest*>(&model)) {
        Json trees = Json::array();
        for (const auto& t : forest->trees()) trees.push_back(tree_to_json(t));
        return Json{{"model_type", "random_forest"},
                    {"version", kModelFormatVersion},
                    {"params", forest_params_to_json(forest->params())},
                    {"trees", trees}};
    }
    if (const auto* boosted = dynamic_cast<const BoostedModel*>(&model)) {
        Json trees = Json::array();
        for (const auto& t : boosted->trees()) trees.push_back(regression_tree_to_json(t));
        return Json{{"model_type", "gbdt"},
                    {"version", kModelFormatVersion},
                    {"params", boost_params_to_json(boosted->params())},
                    {"base_score", boosted->base_score()},
                    {"trees", trees}};
    }
    if (const auto* ensemble = dynamic_cast<const VotingEnsemble*>(&model)) {
        Json members = Json::array();
        for (const auto& m : ensemble->members()) members.push_back({{"name", m.name}, {"model", model_to_json(*m.model)}});
        return Json{{"model_type", "soft_voting"},
                    {"version", kModelFormatVersion},
                    {"threshold", ensemble->threshold()},
                    {"members", members}};
    }
    if (const auto* tree = dynamic_cast<const DecisionTree*>(&model)) {
        Json j = tree_to_json(*tree);
        j["model_type"] = "decision_tree";
        return j;
    }
    throw InvalidArgument("cannot serialize model of type '" + model.model_type() + "'");
}

std::shared_ptr<const ProbabilisticModel> model_from_json(const Json& j) {
    const std::string type = j.value("model_type", "");
    if (type == "random_forest") {
        check_envelope(j, type);
        std::vector<DecisionTree> trees;
        for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
        return std::make_shared<Forest>(std::move(trees), forest_params_from_json(j.at("params")));
    }
    if (type == "gbdt") {
        check_envelope(j, type);
        std::vector<RegressionTree> trees;
        for (const auto& t : j.at("trees")) trees.push_back(regression_tree_from_json(t));
        return std::make_shared<BoostedModel>(j.at("base_score").get<double>(), std::move(trees),
                                              boost_params_from_json(j.at("params")));
    }
    if (type == "soft_voting") {
        check_envelope(j, type);
        std::vector<VotingMember> members;
        for (const auto& m : j.at("members")) {
            members.push_back({m.at("name").get<std::string>(), model_from_json(m.at("model"))});
        }
        return std::make_shared<VotingEnsemble>(std::move(members), j.at("threshold").get<double>());
    }
    if (type == "decision_tree") {
        check_envelope(j, type);
        return std::make_shared<DecisionTree>(tree_from_json(j));
    }
    throw InvalidArgument("unknown model_type '" + type + "'");
}

void save_model(const ProbabilisticModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file " + path.string());
    out << model_to_json(model).dump() << '\n';
}

std::shared_ptr<const ProbabilisticModel> load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path.string());
    return model_from_json(Json::parse(in));
}

}  // namespace repurchase
