// Batch command-line front end for the repurchase pipeline.
//   repurchase <subcommand> --config <path> [--out <dir>] [--seed <int>]
// Exit codes: 0 success, 1 usage error, 2 stage failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "repurchase/pipeline.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& cmd, Options& opts) {
    cmd.add_option("--config", opts.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--out", opts.out, "run directory (overrides output_dir)");
    cmd.add_option("--seed", opts.seed, "top-level seed (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace repurchase;

    CLI::App app{"Repurchase prediction: RFMST features, SMOTE-ENN, tuned tree ensembles, soft voting"};
    app.require_subcommand(1);
    Options opts;
    struct Entry {
        const char* name;
        const char* help;
        Stage last;
    };
    const Entry entries[] = {
        {"gen", "write a synthetic transaction log", Stage::gen},
        {"ingest", "parse and label the transaction log", Stage::ingest},
        {"featurize", "compute RFMST features", Stage::featurize},
        {"balance", "SMOTE-ENN balance the training split", Stage::balance},
        {"tune", "hyperparameter search per model", Stage::tune},
        {"train", "fit tuned models and the voting ensemble", Stage::train},
        {"evaluate", "repeated resampled test evaluation", Stage::evaluate},
        {"report", "render the evaluation report", Stage::report},
        {"pipeline", "run every stage", Stage::report},
    };
    std::optional<Entry> chosen;
    for (const auto& e : entries) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(*cmd, opts);
        cmd->callback([&chosen, e] { chosen = e; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    PipelineConfig config;
    try {
        config = PipelineConfig::load(opts.config, opts.seed);
        if (!opts.out.empty()) config.output_dir = opts.out;
        // gen always writes a synthetic log, even when the config names an input.
        if (chosen->last == Stage::gen) config.input.reset();
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        run_pipeline(config, chosen->last, &std::cerr);
        if (chosen->last == Stage::report) {
            std::ifstream in(config.output_dir / "report.txt");
            std::cout << in.rdbuf();
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
