#include "repurchase/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "repurchase/digest.hpp"
#include "repurchase/ensemble.hpp"
#include "repurchase/features.hpp"
#include "repurchase/metrics.hpp"
#include "repurchase/model_io.hpp"

namespace repurchase {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Model families and search spaces

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::forest: return "forest";
        case ModelKind::gbdt_depthwise: return "gbdt_depthwise";
        case ModelKind::gbdt_goss: return "gbdt_goss";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "forest") return ModelKind::forest;
    if (name == "gbdt_depthwise") return ModelKind::gbdt_depthwise;
    if (name == "gbdt_goss") return ModelKind::gbdt_goss;
    throw InvalidArgument("unknown model '" + name + "' (expected forest, gbdt_depthwise or gbdt_goss)");
}

SearchSpace forest_search_space() {
    return SearchSpace({Dimension::integer("n_trees", 1, 500), Dimension::integer("max_depth", 10, 30),
                        Dimension::categorical("criterion", {"gini", "entropy"}),
                        Dimension::integer("max_features", 1, 5)});
}

std::vector<std::size_t> forest_grid_counts() { return {10, 20, 2, 4}; }

SearchSpace default_search_space(ModelKind kind) {
    switch (kind) {
        case ModelKind::forest: return forest_search_space();
        case ModelKind::gbdt_depthwise:
            return SearchSpace({Dimension::integer("n_trees", 50, 300), Dimension::log_uniform("learning_rate", 0.01, 0.5),
                                Dimension::integer("max_depth", 3, 10), Dimension::uniform("subsample", 0.5, 1.0),
                                Dimension::uniform("gamma", 0.0, 5.0)});
        case ModelKind::gbdt_goss:
            return SearchSpace({Dimension::integer("n_trees", 50, 300), Dimension::log_uniform("learning_rate", 0.01, 0.5),
                                Dimension::integer("max_leaves", 4, 64)});
    }
    throw InvalidArgument("unknown model kind");
}

std::vector<std::size_t> default_grid_counts(ModelKind kind) {
    switch (kind) {
        case ModelKind::forest: return forest_grid_counts();
        case ModelKind::gbdt_depthwise: return {4, 4, 4, 3, 3};
        case ModelKind::gbdt_goss: return {5, 5, 6};
    }
    throw InvalidArgument("unknown model kind");
}

ForestParams default_forest_params() {
    ForestParams p;
    p.n_trees = 200;
    p.tree.max_depth = 11;
    p.tree.criterion = Criterion::gini;
    p.tree.max_features = 3;
    return p;
}

BoostParams default_boost_params(ModelKind kind) {
    BoostParams p;
    if (kind == ModelKind::gbdt_goss) {
        p.max_leaves = 31;
        p.max_depth = -1;
        p.goss = GossParams{};
    }
    return p;
}

ForestParams apply_config(ForestParams p, const SearchSpace& space, const Config& config) {
    for (const auto& dim : space.dimensions()) {
        const auto& n = dim.name;
        if (n == "n_trees") {
            p.n_trees = static_cast<int>(space.integer(config, n));
        } else if (n == "max_depth") {
            p.tree.max_depth = static_cast<int>(space.integer(config, n));
        } else if (n == "criterion") {
            p.tree.criterion = criterion_from_string(space.choice(config, n));
        } else if (n == "max_features") {
            p.tree.max_features = static_cast<int>(space.integer(config, n));
        } else if (n == "min_samples_leaf") {
            p.tree.min_samples_leaf = static_cast<int>(space.integer(config, n));
        } else {
            throw InvalidArgument("forest has no hyperparameter '" + n + "'");
        }
    }
    return p;
}

BoostParams apply_config(BoostParams p, const SearchSpace& space, const Config& config) {
    for (const auto& dim : space.dimensions()) {
        const auto& n = dim.name;
        if (n == "n_trees") {
            p.n_trees = static_cast<int>(space.integer(config, n));
        } else if (n == "learning_rate") {
            p.learning_rate = space.real(config, n);
        } else if (n == "max_depth") {
            p.max_depth = static_cast<int>(space.integer(config, n));
        } else if (n == "max_leaves") {
            p.max_leaves = static_cast<int>(space.integer(config, n));
        } else if (n == "lambda") {
            p.lambda = space.real(config, n);
        } else if (n == "gamma") {
            p.gamma = space.real(config, n);
        } else if (n == "min_child_weight") {
            p.min_child_weight = space.real(config, n);
        } else if (n == "subsample") {
            p.subsample = space.real(config, n);
        } else if (n == "top_rate" || n == "other_rate") {
            if (!p.goss) throw InvalidArgument("'" + n + "' needs GOSS sampling");
            (n == "top_rate" ? p.goss->top_rate : p.goss->other_rate) = space.real(config, n);
        } else {
            throw InvalidArgument("gbdt has no hyperparameter '" + n + "'");
        }
    }
    return p;
}

ModelSetup ModelSetup::defaults(ModelKind kind) {
    ModelSetup s;
    s.kind = kind;
    s.space = default_search_space(kind);
    s.grid_counts = default_grid_counts(kind);
    s.forest = default_forest_params();
    s.boost = default_boost_params(kind);
    return s;
}

std::shared_ptr<const ProbabilisticModel> ModelSetup::fit(const Dataset& train, const Config& config,
                                                          std::uint64_t seed) const {
    if (kind == ModelKind::forest) {
        ForestParams p = apply_config(forest, space, config);
        p.seed = seed;
        return std::make_shared<Forest>(fit_forest(train, p));
    }
    BoostParams p = apply_config(boost, space, config);
    p.seed = seed;
    return std::make_shared<BoostedModel>(fit_boosted(train, p));
}

double validation_objective(const ModelSetup& setup, const Dataset& train, const Dataset& valid, const Config& config,
                            std::uint64_t seed, double threshold) {
    const auto model = setup.fit(train, config, seed);
    return 1.0 - evaluate(*model, valid, threshold).f1;
}

// ---------------------------------------------------------------------------
// Configuration

SeedPlan SeedPlan::derive(std::uint64_t root) {
    SeedPlan s;
    s.root = root;
    s.synthetic = mix_seed(root, 1);
    s.split = mix_seed(root, 2);
    s.smote = mix_seed(root, 3);
    s.tune = mix_seed(root, 4);
    s.train = mix_seed(root, 5);
    s.evaluate = mix_seed(root, 6);
    return s;
}

Json SeedPlan::to_json() const {
    return Json{{"root", root},   {"synthetic", synthetic}, {"split", split},       {"smote", smote},
                {"tune", tune},   {"train", train},         {"evaluate", evaluate}};
}

namespace {

Timestamp require_timestamp(const Json& j, const char* key) {
    const auto text = j.at(key).get<std::string>();
    const auto ts = parse_timestamp(text);
    if (!ts) throw InvalidArgument(std::string("bad timestamp for '") + key + "': " + text);
    return *ts;
}

Dimension dimension_from_json(const Json& j) {
    const auto name = j.at("name").get<std::string>();
    const auto type = j.at("type").get<std::string>();
    if (type == "uniform") return Dimension::uniform(name, j.at("low").get<double>(), j.at("high").get<double>());
    if (type == "log_uniform") {
        return Dimension::log_uniform(name, j.at("low").get<double>(), j.at("high").get<double>());
    }
    if (type == "int" || type == "integer") {
        return Dimension::integer(name, j.at("low").get<std::int64_t>(), j.at("high").get<std::int64_t>());
    }
    if (type == "categorical") return Dimension::categorical(name, j.at("choices").get<std::vector<std::string>>());
    throw InvalidArgument("unknown dimension type '" + type + "'");
}

Json dimension_to_json(const Dimension& d) {
    Json j{{"name", d.name}, {"type", to_string(d.kind)}};
    if (d.kind == DimensionKind::categorical) {
        j["choices"] = d.choices;
    } else if (d.kind == DimensionKind::integer) {
        j["low"] = static_cast<std::int64_t>(d.low);
        j["high"] = static_cast<std::int64_t>(d.high);
    } else {
        j["low"] = d.low;
        j["high"] = d.high;
    }
    return j;
}

ModelSetup model_from_json(ModelKind kind, const Json& j) {
    ModelSetup s = ModelSetup::defaults(kind);
    if (j.is_null()) return s;
    if (j.contains("space")) {
        SearchSpace space;
        for (const auto& d : j.at("space")) space.add(dimension_from_json(d));
        s.space = std::move(space);
        s.grid_counts.assign(s.space.size(), 3);
    }
    if (j.contains("grid_counts")) s.grid_counts = j.at("grid_counts").get<std::vector<std::size_t>>();
    if (j.contains("params")) {
        // Unlisted parameters keep the family defaults.
        if (kind == ModelKind::forest) {
            Json merged = forest_params_to_json(s.forest);
            merged.update(j.at("params"));
            s.forest = forest_params_from_json(merged);
        } else {
            Json merged = boost_params_to_json(s.boost);
            merged.update(j.at("params"));
            s.boost = boost_params_from_json(merged);
        }
    }
    return s;
}

SynthConfig synth_from_json(const Json& j) {
    SynthConfig c = SynthConfig::defaults();
    if (j.is_null()) return c;
    c.n_users = j.value("n_users", c.n_users);
    c.n_items = j.value("n_items", c.n_items);
    c.mean_items_per_user = j.value("mean_items_per_user", c.mean_items_per_user);
    if (j.contains("start")) c.start = require_timestamp(j, "start");
    c.horizon_days = j.value("horizon_days", c.horizon_days);
    c.first_purchase_days = j.value("first_purchase_days", c.first_purchase_days);
    c.loyal_fraction = j.value("loyal_fraction", c.loyal_fraction);
    c.loyal_rate = j.value("loyal_rate", c.loyal_rate);
    c.casual_rate = j.value("casual_rate", c.casual_rate);
    c.user_shape = j.value("user_shape", c.user_shape);
    c.intensity = j.value("intensity", c.intensity);
    return c;
}

Json synth_to_json(const SynthConfig& c) {
    return Json{{"n_users", c.n_users},
                {"n_items", c.n_items},
                {"mean_items_per_user", c.mean_items_per_user},
                {"start", format_timestamp(c.start)},
                {"horizon_days", c.horizon_days},
                {"first_purchase_days", c.first_purchase_days},
                {"loyal_fraction", c.loyal_fraction},
                {"loyal_rate", c.loyal_rate},
                {"casual_rate", c.casual_rate},
                {"user_shape", c.user_shape},
                {"intensity", c.intensity}};
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const Json& j, const fs::path& base_dir,
                                         std::optional<std::uint64_t> seed_override) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    PipelineConfig c;
    if (seed_override) {
        c.seed = *seed_override;
    } else if (j.contains("seed")) {
        c.seed = j.at("seed").get<std::uint64_t>();
    } else {
        throw InvalidArgument("config needs a 'seed' (or pass --seed)");
    }
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };

    if (j.contains("input") && !j.at("input").is_null()) c.input = resolve(j.at("input").get<std::string>());
    if (j.contains("columns")) {
        const auto& m = j.at("columns");
        c.columns.user_id = m.value("user_id", c.columns.user_id);
        c.columns.item_id = m.value("item_id", c.columns.item_id);
        c.columns.timestamp = m.value("timestamp", c.columns.timestamp);
        c.columns.quantity = m.value("quantity", c.columns.quantity);
        c.columns.amount = m.value("amount", c.columns.amount);
        c.columns.payment_method = m.value("payment_method", c.columns.payment_method);
    }
    c.synthetic = synth_from_json(j.value("synthetic", Json()));
    if (j.contains("window")) {
        const auto& w = j.at("window");
        c.window.observation_start = require_timestamp(w, "observation_start");
        c.window.observation_end = require_timestamp(w, "observation_end");
        c.window.forecast_end = require_timestamp(w, "forecast_end");
    } else if (!c.input) {
        c.window = SynthConfig::default_window();
    } else {
        throw InvalidArgument("config needs a 'window' when an input file is given");
    }
    if (j.contains("split")) c.split_ratio = j.at("split").value("ratio", c.split_ratio);
    if (j.contains("balance")) {
        const auto& b = j.at("balance");
        c.balance = b.value("enabled", c.balance);
        c.smote.k_neighbors = b.value("smote_k", c.smote.k_neighbors);
        c.smote.target_ratio = b.value("target_ratio", c.smote.target_ratio);
        c.enn.k = b.value("enn_k", c.enn.k);
    }
    if (j.contains("models")) {
        const auto& m = j.at("models");
        if (m.is_array()) {
            for (const auto& name : m) c.models.push_back(ModelSetup::defaults(model_kind_from_string(name.get<std::string>())));
        } else {
            for (const auto& [name, spec] : m.items()) c.models.push_back(model_from_json(model_kind_from_string(name), spec));
        }
    } else {
        for (auto k : {ModelKind::forest, ModelKind::gbdt_depthwise, ModelKind::gbdt_goss}) {
            c.models.push_back(ModelSetup::defaults(k));
        }
    }
    if (j.contains("tuner")) {
        const auto& t = j.at("tuner");
        c.tuner.method = t.value("method", c.tuner.method);
        c.tuner.max_trials = t.value("max_trials", c.tuner.max_trials);
        c.tuner.gamma = t.value("gamma", c.tuner.gamma);
        c.tuner.n_startup = t.value("n_startup", c.tuner.n_startup);
        c.tuner.n_candidates = t.value("n_candidates", c.tuner.n_candidates);
        c.tuner.max_grid_configs = t.value("max_grid_configs", c.tuner.max_grid_configs);
    }
    if (j.contains("voting")) {
        const auto& v = j.at("voting");
        c.voting_members = v.value("members", c.voting_members);
        c.voting_threshold = v.value("threshold", c.voting_threshold);
    }
    if (c.voting_members.empty()) {
        for (const char* name : {"forest", "gbdt_goss"}) {
            for (const auto& m : c.models) {
                if (m.name() == name) c.voting_members.emplace_back(name);
            }
        }
    }
    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        c.eval_rounds = e.value("rounds", c.eval_rounds);
        c.eval_threshold = e.value("threshold", c.eval_threshold);
    }
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j, path.parent_path(), seed_override);
}

Json PipelineConfig::to_json() const {
    // Paths are left out: the input is identified by its digest and the output
    // directory does not influence results.
    Json models = Json::object();
    for (const auto& m : this->models) {
        Json space = Json::array();
        for (const auto& d : m.space.dimensions()) space.push_back(dimension_to_json(d));
        models[m.name()] = {{"space", space},
                            {"grid_counts", m.grid_counts},
                            {"params", m.kind == ModelKind::forest ? forest_params_to_json(m.forest)
                                                                   : boost_params_to_json(m.boost)}};
    }
    return Json{{"seed", seed},
                {"columns",
                 {{"user_id", columns.user_id},
                  {"item_id", columns.item_id},
                  {"timestamp", columns.timestamp},
                  {"quantity", columns.quantity},
                  {"amount", columns.amount},
                  {"payment_method", columns.payment_method}}},
                {"window",
                 {{"observation_start", format_timestamp(window.observation_start)},
                  {"observation_end", format_timestamp(window.observation_end)},
                  {"forecast_end", format_timestamp(window.forecast_end)}}},
                {"split", {{"ratio", split_ratio}}},
                {"balance",
                 {{"enabled", balance},
                  {"smote_k", smote.k_neighbors},
                  {"target_ratio", smote.target_ratio},
                  {"enn_k", enn.k}}},
                {"models", models},
                {"tuner",
                 {{"method", tuner.method},
                  {"max_trials", tuner.max_trials},
                  {"gamma", tuner.gamma},
                  {"n_startup", tuner.n_startup},
                  {"n_candidates", tuner.n_candidates},
                  {"max_grid_configs", tuner.max_grid_configs}}},
                {"voting", {{"members", voting_members}, {"threshold", voting_threshold}}},
                {"evaluation", {{"rounds", eval_rounds}, {"threshold", eval_threshold}}},
                {"synthetic", input ? Json() : synth_to_json(synthetic)}};
}

std::string PipelineConfig::hash() const { return sha256_hex(to_json().dump()); }

const ModelSetup& PipelineConfig::model(const std::string& name) const {
    for (const auto& m : models) {
        if (m.name() == name) return m;
    }
    throw InvalidArgument("model '" + name + "' is not configured");
}

void PipelineConfig::validate() const {
    window.validate();
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
    if (smote.k_neighbors < 1 || enn.k < 1) throw InvalidArgument("SMOTE and ENN k must be >= 1");
    if (!(smote.target_ratio > 0.0 && smote.target_ratio <= 1.0)) {
        throw InvalidArgument("SMOTE target ratio must lie in (0, 1]");
    }
    if (models.empty()) throw InvalidArgument("at least one model must be configured");
    for (std::size_t i = 0; i < models.size(); ++i) {
        const auto& m = models[i];
        for (std::size_t k = 0; k < i; ++k) {
            if (models[k].kind == m.kind) throw InvalidArgument("model '" + m.name() + "' listed twice");
        }
        if (m.space.size() == 0) throw InvalidArgument("model '" + m.name() + "' has an empty search space");
        if (m.grid_counts.size() != m.space.size()) {
            throw InvalidArgument("model '" + m.name() + "' needs one grid count per search dimension");
        }
        // Catch unknown hyperparameter names before any stage runs.
        Config probe;
        for (const auto& d : m.space.dimensions()) {
            probe.values.push_back(d.kind == DimensionKind::categorical ? 0.0 : d.low);
        }
        if (m.kind == ModelKind::forest) {
            apply_config(m.forest, m.space, probe).validate();
        } else {
            apply_config(m.boost, m.space, probe).validate();
        }
    }
    if (tuner.method != "tpe" && tuner.method != "random" && tuner.method != "grid") {
        throw InvalidArgument("tuner method must be tpe, random or grid");
    }
    if (tuner.max_trials < 1) throw InvalidArgument("tuner max_trials must be >= 1");
    TpeParams{tuner.gamma, tuner.n_startup, tuner.n_candidates, tuner.max_trials, 0}.validate();
    if (voting_members.size() < 2) throw InvalidArgument("voting needs at least two members");
    for (const auto& name : voting_members) (void)model(name);
    if (!(voting_threshold > 0.0 && voting_threshold < 1.0)) throw InvalidArgument("voting threshold must lie in (0, 1)");
    if (eval_rounds < 1) throw InvalidArgument("evaluation needs at least one round");
    if (!(eval_threshold > 0.0 && eval_threshold < 1.0)) {
        throw InvalidArgument("evaluation threshold must lie in (0, 1)");
    }
    if (!input) synthetic.validate();
}

// ---------------------------------------------------------------------------
// Stages

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::gen: return "gen";
        case Stage::ingest: return "ingest";
        case Stage::featurize: return "featurize";
        case Stage::balance: return "balance";
        case Stage::tune: return "tune";
        case Stage::train: return "train";
        case Stage::evaluate: return "evaluate";
        case Stage::report: return "report";
    }
    return "?";
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::gen,   Stage::ingest, Stage::featurize, Stage::balance,
                                           Stage::tune,  Stage::train,  Stage::evaluate,  Stage::report};
    return stages;
}

Stage stage_from_string(const std::string& name) {
    for (Stage s : all_stages()) {
        if (to_string(s) == name) return s;
    }
    throw InvalidArgument("unknown stage '" + name + "'");
}

StageError::StageError(Stage stage, const std::string& message)
    : Error("stage '" + to_string(stage) + "' failed: " + message), stage_(stage) {}

namespace {

constexpr const char* kTransactions = "transactions.csv";
constexpr const char* kIngest = "ingest.json";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kBalanced = "balanced.csv";
constexpr const char* kTuning = "tuning.json";
constexpr const char* kReport = "report.json";
constexpr const char* kReportText = "report.txt";
constexpr const char* kManifest = "manifest.json";

std::string tuning_history_name(const ModelSetup& m) { return "tuning_" + m.name() + ".jsonl"; }
std::string model_file_name(const std::string& name) { return "models/" + name + ".json"; }
constexpr const char* kEnsembleFile = "models/ensemble.json";

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError(line, "bad number '" + std::string(text) + "'");
    }
    return v;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("missing artifact " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_balanced_csv(const fs::path& path, const BalancedSet& set) {
    std::ostringstream out;
    out << "R,F,M,S,T,label,synthetic\n";
    for (std::size_t i = 0; i < set.data.size(); ++i) {
        for (double v : set.data.x.row(i)) out << format_number(v) << ',';
        out << set.data.y[i] << ',' << static_cast<int>(set.synthetic[i]) << '\n';
    }
    write_text(path, out.str());
}

Dataset read_balanced_csv(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    Dataset d;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cells = split_csv_line(line);
        if (cells.size() != kFeatureCount + 2) throw ParseError(line_no, "expected 7 columns");
        std::array<double, kFeatureCount> row{};
        for (std::size_t f = 0; f < kFeatureCount; ++f) row[f] = parse_number(cells[f], line_no);
        d.push_back(row, static_cast<int>(parse_number(cells[kFeatureCount], line_no)));
    }
    return d;
}

struct Split {
    std::vector<FeatureRow> train, valid;
};

std::vector<FeatureRow> read_features(const fs::path& dir) {
    std::istringstream in(read_text(dir / kFeatures));
    return read_feature_csv(in);
}

Split split_features(const PipelineConfig& c, const fs::path& dir) {
    auto [train, valid] = train_valid_split(read_features(dir), c.split_ratio, c.seeds().split);
    return {std::move(train), std::move(valid)};
}

Dataset rows_with_label(const std::vector<FeatureRow>& rows, int label) {
    Dataset d;
    for (const auto& r : rows) {
        if (r.label == label) d.push_back(r.values(), r.label);
    }
    return d;
}

fs::path input_path(const PipelineConfig& c, const fs::path& dir) { return c.input ? *c.input : dir / kTransactions; }

struct Ingested {
    ParseResult parsed;
    WindowSplit windows;
    std::vector<LabeledPair> pairs;
};

Ingested ingest(const PipelineConfig& c, const fs::path& dir) {
    const auto path = input_path(c, dir);
    std::ifstream in(path);
    if (!in) throw Error("cannot open input " + path.string());
    Ingested out;
    out.parsed = parse_transactions(in, c.columns);
    out.windows = split_windows(out.parsed.transactions, c.window);
    out.pairs = label_pairs(out.windows.observation, out.windows.forecast);
    return out;
}

std::uint64_t model_seed(std::uint64_t base, ModelKind kind) { return mix_seed(base, static_cast<std::uint64_t>(kind)); }

// Manifest bookkeeping: each stage stores a key (hash of the config and the
// stage's input artifacts) and the hashes of the artifacts it wrote.
class Manifest {
public:
    Manifest(const PipelineConfig& c, fs::path dir) : dir_(std::move(dir)) {
        const auto path = dir_ / kManifest;
        if (fs::exists(path)) {
            try {
                j_ = Json::parse(read_text(path));
            } catch (const std::exception&) {
                j_ = Json();
            }
        }
        if (!j_.is_object() || j_.value("config_hash", "") != c.hash()) j_ = Json::object();
        j_["config_hash"] = c.hash();
        j_["seeds"] = c.seeds().to_json();
        if (!j_.contains("stages")) j_["stages"] = Json::object();
    }

    std::string key(Stage s, const std::vector<std::string>& inputs) const {
        std::string material = to_string(s) + '\n' + j_.at("config_hash").get<std::string>() + '\n';
        for (const auto& name : inputs) material += name + '=' + sha256_file(resolve(name)) + '\n';
        return sha256_hex(material);
    }

    bool up_to_date(Stage s, const std::string& key) const {
        const auto& stages = j_.at("stages");
        const auto it = stages.find(to_string(s));
        if (it == stages.end() || it->value("key", "") != key) return false;
        for (const auto& [name, hash] : it->at("outputs").items()) {
            const auto path = resolve(name);
            if (!fs::exists(path) || sha256_file(path) != hash.get<std::string>()) return false;
        }
        return true;
    }

    void record(Stage s, const std::string& key, const std::vector<std::string>& outputs, Json extra = Json()) {
        Json out = Json::object();
        for (const auto& name : outputs) out[name] = sha256_file(resolve(name));
        Json entry{{"key", key}, {"outputs", out}};
        if (!extra.is_null()) entry["details"] = std::move(extra);
        j_["stages"][to_string(s)] = std::move(entry);
        save();
    }

    void set_input(const std::string& path, const std::string& digest) {
        j_["input"] = {{"path", path}, {"sha256", digest}};
    }

    [[nodiscard]] Json details(Stage s) const {
        const auto& stages = j_.at("stages");
        const auto it = stages.find(to_string(s));
        return it == stages.end() ? Json() : it->value("details", Json());
    }

    void save() {
        // Artifact index: every recorded output with its hash.
        Json artifacts = Json::object();
        for (Stage s : all_stages()) {
            const auto it = j_["stages"].find(to_string(s));
            if (it == j_["stages"].end()) continue;
            for (const auto& [name, hash] : it->at("outputs").items()) artifacts[name] = hash;
        }
        j_["artifacts"] = artifacts;
        write_text(dir_ / kManifest, j_.dump(2) + '\n');
    }

    [[nodiscard]] fs::path resolve(const std::string& name) const {
        const fs::path p(name);
        return p.is_absolute() ? p : dir_ / p;
    }

private:
    fs::path dir_;
    Json j_;
};

struct StageIo {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

StageIo stage_io(Stage s, const PipelineConfig& c, const fs::path& dir) {
    const std::string input = c.input ? input_path(c, dir).string() : std::string(kTransactions);
    switch (s) {
        case Stage::gen: return {{}, c.input ? std::vector<std::string>{} : std::vector<std::string>{kTransactions}};
        case Stage::ingest: return {{input}, {kIngest}};
        case Stage::featurize: return {{input}, {kFeatures}};
        case Stage::balance: return {{kFeatures}, {kBalanced}};
        case Stage::tune: {
            StageIo io{{kFeatures, kBalanced}, {kTuning}};
            for (const auto& m : c.models) io.outputs.push_back(tuning_history_name(m));
            return io;
        }
        case Stage::train: {
            StageIo io{{kBalanced, kTuning}, {}};
            for (const auto& m : c.models) io.outputs.push_back(model_file_name(m.name()));
            io.outputs.emplace_back(kEnsembleFile);
            return io;
        }
        case Stage::evaluate: {
            StageIo io{{kFeatures}, {kReport}};
            for (const auto& m : c.models) io.inputs.push_back(model_file_name(m.name()));
            io.inputs.emplace_back(kEnsembleFile);
            return io;
        }
        case Stage::report: return {{kReport}, {kReportText}};
    }
    return {};
}

Json run_gen(const PipelineConfig& c, const fs::path& dir) {
    if (c.input) return Json{{"generated", false}};
    SynthConfig s = c.synthetic;
    s.seed = c.seeds().synthetic;
    const auto txs = gen_synthetic(s);
    std::ostringstream out;
    write_transactions(out, txs);
    write_text(dir / kTransactions, out.str());
    return Json{{"generated", true}, {"transactions", txs.size()}};
}

Json run_ingest(const PipelineConfig& c, const fs::path& dir) {
    const auto ing = ingest(c, dir);
    std::size_t positives = 0;
    for (const auto& p : ing.pairs) positives += static_cast<std::size_t>(p.label);
    Json skipped = Json::array();
    for (const auto& e : ing.parsed.skipped) skipped.push_back({{"line", e.line}, {"message", e.message}});
    const double rate = ing.pairs.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(ing.pairs.size());
    Json j{{"rows_read", ing.parsed.rows_read},
           {"transactions", ing.parsed.transactions.size()},
           {"skipped_count", ing.parsed.skipped.size()},
           {"skipped", skipped},
           {"observation_transactions", ing.windows.observation.size()},
           {"forecast_transactions", ing.windows.forecast.size()},
           {"outside_windows", ing.windows.dropped},
           {"pairs", ing.pairs.size()},
           {"positives", positives},
           {"negatives", ing.pairs.size() - positives},
           {"positive_rate", rate}};
    write_text(dir / kIngest, j.dump(2) + '\n');
    return Json{{"pairs", ing.pairs.size()}, {"positives", positives}};
}

Json run_featurize(const PipelineConfig& c, const fs::path& dir) {
    const auto ing = ingest(c, dir);
    if (ing.pairs.empty()) throw Error("no <user,item> pairs in the observation window");
    const auto rows = compute_features(ing.pairs, c.window);
    std::ostringstream out;
    write_feature_csv(out, rows);
    write_text(dir / kFeatures, out.str());
    return Json{{"rows", rows.size()}};
}

Json run_balance(const PipelineConfig& c, const fs::path& dir) {
    const auto split = split_features(c, dir);
    const Dataset train = to_dataset(split.train);
    BalancedSet set;
    if (c.balance) {
        SmoteParams smote = c.smote;
        smote.seed = c.seeds().smote;
        set = smote_enn_standardized(train, smote, c.enn);
    } else {
        set.data = train;
        set.synthetic.assign(train.size(), 0);
    }
    write_balanced_csv(dir / kBalanced, set);
    return Json{{"train_rows", train.size()},
                {"train_positives", train.count_label(1)},
                {"generated", set.generated},
                {"removed", set.removed},
                {"rows", set.data.size()},
                {"positives", set.data.count_label(1)}};
}

Json run_tune(const PipelineConfig& c, const fs::path& dir) {
    const Dataset train = read_balanced_csv(dir / kBalanced);
    const Dataset valid = to_dataset(split_features(c, dir).valid);
    const auto seeds = c.seeds();
    Json summary = Json::object();
    Json evaluations = Json::object();
    for (const auto& m : c.models) {
        const std::uint64_t fit_seed = model_seed(seeds.train, m.kind);
        const Objective objective = [&](const Config& cfg) {
            return validation_objective(m, train, valid, cfg, fit_seed, c.eval_threshold);
        };
        TuneResult result;
        if (c.tuner.method == "tpe") {
            result = tune(objective, m.space,
                          TpeParams{c.tuner.gamma, c.tuner.n_startup, c.tuner.n_candidates, c.tuner.max_trials,
                                    model_seed(seeds.tune, m.kind)});
        } else if (c.tuner.method == "random") {
            result = random_search(objective, m.space, c.tuner.max_trials, model_seed(seeds.tune, m.kind));
        } else {
            result = grid_search(objective, m.space, m.grid_counts, c.tuner.max_grid_configs);
        }
        std::ofstream hist(dir / tuning_history_name(m), std::ios::binary);
        write_history_jsonl(hist, result.history, m.space);
        if (!hist) throw Error("cannot write tuning history for " + m.name());
        if (result.best.status != TrialStatus::ok) throw Error("every " + m.name() + " trial failed");

        Json best = Json::object();
        for (std::size_t d = 0; d < m.space.size(); ++d) {
            const auto& dim = m.space[d];
            if (dim.kind == DimensionKind::categorical) {
                best[dim.name] = m.space.choice(result.best.config, dim.name);
            } else {
                best[dim.name] = result.best.config.values[d];
            }
        }
        summary[m.name()] = {{"method", c.tuner.method},
                             {"evaluations", result.history.size()},
                             {"best_index", result.best.index},
                             {"best_objective", result.best.objective},
                             {"best_config", best},
                             {"encoded", result.best.config.values}};
        evaluations[m.name()] = result.history.size();
    }
    write_text(dir / kTuning, summary.dump(2) + '\n');
    return Json{{"evaluations", evaluations}};
}

Json run_train(const PipelineConfig& c, const fs::path& dir) {
    const Dataset train = read_balanced_csv(dir / kBalanced);
    const Json tuning = Json::parse(read_text(dir / kTuning));
    const auto seeds = c.seeds();
    fs::create_directories(dir / "models");
    std::map<std::string, std::shared_ptr<const ProbabilisticModel>> fitted;
    for (const auto& m : c.models) {
        Config cfg{tuning.at(m.name()).at("encoded").get<std::vector<double>>()};
        auto model = m.fit(train, cfg, model_seed(seeds.train, m.kind));
        save_model(*model, dir / model_file_name(m.name()));
        fitted[m.name()] = std::move(model);
    }
    std::vector<VotingMember> members;
    for (const auto& name : c.voting_members) members.push_back({name, fitted.at(name)});
    save_model(VotingEnsemble(std::move(members), c.voting_threshold), dir / kEnsembleFile);
    return Json{{"models", fitted.size()}};
}

Json run_evaluate(const PipelineConfig& c, const fs::path& dir) {
    const auto valid = split_features(c, dir).valid;
    const Dataset positives = rows_with_label(valid, 1);
    const Dataset negatives = rows_with_label(valid, 0);
    if (positives.size() == 0 || negatives.size() == 0) {
        throw Error("validation split needs both classes (positives " + std::to_string(positives.size()) +
                    ", negatives " + std::to_string(negatives.size()) + ")");
    }
    const auto seed = c.seeds().evaluate;
    Json models = Json::object();
    for (const auto& m : c.models) {
        const auto model = load_model(dir / model_file_name(m.name()));
        models[m.name()] = report_json(repeated_eval(*model, positives, negatives, c.eval_rounds, seed, c.eval_threshold));
    }
    const auto ensemble = load_model(dir / kEnsembleFile);
    Json report{{"config_hash", c.hash()},
                {"rounds", c.eval_rounds},
                {"threshold", c.eval_threshold},
                {"pools", {{"positives", positives.size()}, {"negatives", negatives.size()}}},
                {"models", models},
                {"ensemble",
                 {{"members", c.voting_members},
                  {"threshold", c.voting_threshold},
                  {"report", report_json(repeated_eval(*ensemble, positives, negatives, c.eval_rounds, seed,
                                                       c.voting_threshold))}}}};
    write_text(dir / kReport, report.dump(2) + '\n');
    return Json();
}

Json run_report(const PipelineConfig&, const fs::path& dir) {
    write_text(dir / kReportText, render_report(Json::parse(read_text(dir / kReport))));
    return Json();
}

Json run_stage(Stage s, const PipelineConfig& c, const fs::path& dir) {
    switch (s) {
        case Stage::gen: return run_gen(c, dir);
        case Stage::ingest: return run_ingest(c, dir);
        case Stage::featurize: return run_featurize(c, dir);
        case Stage::balance: return run_balance(c, dir);
        case Stage::tune: return run_tune(c, dir);
        case Stage::train: return run_train(c, dir);
        case Stage::evaluate: return run_evaluate(c, dir);
        case Stage::report: return run_report(c, dir);
    }
    return Json();
}

}  // namespace

std::vector<StageOutcome> run_pipeline(const PipelineConfig& config, Stage last, std::ostream* log) {
    config.validate();
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    Manifest manifest(config, dir);
    std::vector<StageOutcome> outcomes;
    for (Stage s : all_stages()) {
        if (static_cast<int>(s) > static_cast<int>(last)) break;
        try {
            const auto io = stage_io(s, config, dir);
            const auto key = manifest.key(s, io.inputs);
            if (s == Stage::ingest) {
                const auto in = input_path(config, dir);
                manifest.set_input(in.string(), sha256_file(in));
            }
            if (manifest.up_to_date(s, key)) {
                outcomes.push_back({s, true});
                if (log) *log << "[" << to_string(s) << "] up to date\n";
                continue;
            }
            Json details = run_stage(s, config, dir);
            manifest.record(s, key, io.outputs, std::move(details));
            outcomes.push_back({s, false});
            if (log) *log << "[" << to_string(s) << "] done\n";
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(s, e.what());
        }
    }
    return outcomes;
}

std::string render_report(const Json& report) {
    std::ostringstream out;
    out << "Repurchase prediction report\n";
    out << "rounds: " << report.at("rounds").get<std::size_t>() << ", test pools: "
        << report.at("pools").at("positives").get<std::size_t>() << " positive / "
        << report.at("pools").at("negatives").get<std::size_t>() << " negative\n\n";
    out << std::left << std::setw(28) << "model" << std::right << std::setw(10) << "precision" << std::setw(10)
        << "recall" << std::setw(10) << "F1" << '\n';
    auto line = [&](const std::string& name, const Json& r) {
        const auto& mean = r.at("mean");
        out << std::left << std::setw(28) << name << std::right << std::fixed << std::setprecision(4) << std::setw(10)
            << mean.at("P").get<double>() << std::setw(10) << mean.at("R").get<double>() << std::setw(10)
            << mean.at("F1").get<double>() << '\n';
        for (const auto& f : r.at("flags")) out << "  note: " << f.get<std::string>() << '\n';
    };
    for (const auto& [name, r] : report.at("models").items()) line(name, r);
    std::string members;
    for (const auto& m : report.at("ensemble").at("members")) members += (members.empty() ? "" : "+") + m.get<std::string>();
    line("soft vote (" + members + ")", report.at("ensemble").at("report"));
    return out.str();
}

}  // namespace repurchase
