// Command line front end for the transformer loss-of-life pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 invalid data or configuration,
// 3 numerical failure.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "txlife/config.hpp"
#include "txlife/errors.hpp"
#include "txlife/estimators.hpp"
#include "txlife/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool force = false;
};

txlife::config::RunConfig resolve_config(const CliOptions& opts) {
    txlife::config::RunConfig cfg = txlife::config::read_run_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    txlife::config::validate(cfg);
    return cfg;
}

txlife::estimators::EstimatorKind kind_from_name(const std::string& name) {
    using txlife::estimators::EstimatorKind;
    if (name == "anfis") return EstimatorKind::Anfis;
    if (name == "rbf") return EstimatorKind::Rbf;
    return EstimatorKind::Mlp;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transformer loss-of-life estimation pipeline"};
    app.name("txlife");
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--config", opts.config_path, "key = value run configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", opts.seed, "override the global seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    app.add_option("--out", opts.out_dir, "override the output directory");

    CLI::App* params = app.add_subcommand("params", "transformer parameter files");
    params->require_subcommand(1);
    CLI::App* params_init =
        params->add_subcommand("init", "write the default parameter file");
    params_init->add_flag("--force", opts.force, "replace an existing file");

    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "generate the hourly dataset from the thermal model");

    std::string train_method;
    CLI::App* train = app.add_subcommand("train", "train one estimator");
    train->add_option("--method", train_method, "estimator to train")
        ->required()
        ->check(CLI::IsMember({"anfis", "rbf", "mlp"}));

    std::string fuse_method;
    CLI::App* fuse = app.add_subcommand("fuse", "fit one fusion stage");
    fuse->add_option("--method", fuse_method, "fusion scheme to fit")
        ->required()
        ->check(CLI::IsMember({"owa", "kalman"}));

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score all methods on the test split");
    CLI::App* run_all =
        app.add_subcommand("run-all", "run every stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const txlife::config::RunConfig cfg = resolve_config(opts);
        namespace pipeline = txlife::pipeline;
        if (params_init->parsed()) {
            pipeline::cmd_params_init(pipeline::layout_for(cfg).params_file(),
                                      opts.force);
        } else if (synthesize->parsed()) {
            pipeline::cmd_synthesize(cfg);
        } else if (train->parsed()) {
            pipeline::cmd_train(cfg, kind_from_name(train_method));
        } else if (fuse->parsed()) {
            if (fuse_method == "owa") {
                pipeline::cmd_fuse_owa(cfg);
            } else {
                pipeline::cmd_fuse_kalman(cfg);
            }
        } else if (evaluate->parsed()) {
            pipeline::cmd_evaluate(cfg);
        } else if (run_all->parsed()) {
            pipeline::cmd_run_all(cfg);
        }
        return 0;
    } catch (const txlife::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const txlife::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const txlife::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
