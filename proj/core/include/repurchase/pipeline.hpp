#pragma once

// Batch pipeline: gen -> ingest -> featurize -> balance -> tune -> train ->
// evaluate -> report. Every stage writes its artifacts into one run
// directory and records content hashes in manifest.json; a stage whose inputs
// and outputs still match the manifest is skipped on the next run.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "repurchase/dataio.hpp"
#include "repurchase/forest.hpp"
#include "repurchase/gbdt.hpp"
#include "repurchase/model.hpp"
#include "repurchase/resample.hpp"
#include "repurchase/synth.hpp"
#include "repurchase/tpe.hpp"

namespace repurchase {

using Json = nlohmann::ordered_json;

enum class ModelKind { forest, gbdt_depthwise, gbdt_goss };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Random-forest space: n_trees [1,500], max_depth [10,30], criterion
/// {gini, entropy}, max_features [1,5].
SearchSpace forest_search_space();
/// Grid resolution per forest dimension: 10 x 20 x 2 x 4 = 1600 points.
std::vector<std::size_t> forest_grid_counts();
SearchSpace default_search_space(ModelKind kind);
std::vector<std::size_t> default_grid_counts(ModelKind kind);

/// Base hyperparameters of each model family before search overrides.
ForestParams default_forest_params();
BoostParams default_boost_params(ModelKind kind);

/// Overwrites the parameters named by the space's dimensions; unknown names throw.
ForestParams apply_config(ForestParams base, const SearchSpace& space, const Config& config);
BoostParams apply_config(BoostParams base, const SearchSpace& space, const Config& config);

struct ModelSetup {
    ModelKind kind = ModelKind::forest;
    SearchSpace space;
    std::vector<std::size_t> grid_counts;
    ForestParams forest;  // used when kind == forest
    BoostParams boost;    // used otherwise

    static ModelSetup defaults(ModelKind kind);
    [[nodiscard]] std::string name() const { return to_string(kind); }
    /// Fits this model family at `config` (an assignment over `space`).
    [[nodiscard]] std::shared_ptr<const ProbabilisticModel> fit(const Dataset& train, const Config& config,
                                                                 std::uint64_t seed) const;
};

/// 1 - F1 on `valid` of a model fitted on `train`.
double validation_objective(const ModelSetup& setup, const Dataset& train, const Dataset& valid, const Config& config,
                            std::uint64_t seed, double threshold = 0.5);

struct TunerSettings {
    std::string method = "tpe";  // tpe | random | grid
    std::size_t max_trials = 30;
    double gamma = 0.25;
    std::size_t n_startup = 10;
    std::size_t n_candidates = 24;
    std::size_t max_grid_configs = 10000;
};

/// Named seeds derived from the single top-level seed.
struct SeedPlan {
    std::uint64_t root = 0;
    std::uint64_t synthetic = 0;
    std::uint64_t split = 0;
    std::uint64_t smote = 0;
    std::uint64_t tune = 0;
    std::uint64_t train = 0;
    std::uint64_t evaluate = 0;

    static SeedPlan derive(std::uint64_t root);
    [[nodiscard]] Json to_json() const;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> input;  // absent: generate from `synthetic`
    ColumnMapping columns;
    WindowConfig window;
    double split_ratio = 0.8;
    bool balance = true;
    SmoteParams smote;
    EnnParams enn;
    std::vector<ModelSetup> models;
    TunerSettings tuner;
    std::vector<std::string> voting_members;
    double voting_threshold = 0.5;
    std::size_t eval_rounds = 10;
    double eval_threshold = 0.5;
    SynthConfig synthetic = SynthConfig::defaults();
    std::filesystem::path output_dir = "run";

    /// Relative paths resolve against `base_dir`. "seed" is mandatory unless
    /// `seed_override` is given.
    static PipelineConfig from_json(const Json& j, const std::filesystem::path& base_dir = {},
                                    std::optional<std::uint64_t> seed_override = std::nullopt);
    static PipelineConfig load(const std::filesystem::path& path,
                               std::optional<std::uint64_t> seed_override = std::nullopt);
    /// Canonical form; its SHA-256 is the config hash.
    [[nodiscard]] Json to_json() const;
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] SeedPlan seeds() const { return SeedPlan::derive(seed); }
    [[nodiscard]] const ModelSetup& model(const std::string& name) const;
    void validate() const;
};

enum class Stage { gen, ingest, featurize, balance, tune, train, evaluate, report };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);
const std::vector<Stage>& all_stages();

/// Raised for any failure inside a stage; what() names the stage.
class StageError : public Error {
public:
    StageError(Stage stage, const std::string& message);
    [[nodiscard]] Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct StageOutcome {
    Stage stage;
    bool skipped = false;  // artifacts were already valid
};

/// Runs every stage up to and including `last`, skipping those whose
/// manifest entry still matches. Progress lines go to `log` when non-null.
std::vector<StageOutcome> run_pipeline(const PipelineConfig& config, Stage last = Stage::report,
                                       std::ostream* log = nullptr);

/// Human-readable summary of report.json.
std::string render_report(const Json& report);

}  // namespace repurchase
