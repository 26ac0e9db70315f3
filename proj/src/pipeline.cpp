#include "txlife/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <utility>

#include "txlife/csv.hpp"
#include "txlife/errors.hpp"
#include "txlife/thermal.hpp"

namespace txlife::pipeline {

using nlohmann::ordered_json;

namespace {

constexpr int kManifestVersion = 1;
constexpr int kReportVersion = 1;
constexpr int kFusionVersion = 1;
constexpr std::size_t kPlotSamples = 50;

template <typename Body>
void run_stage(const char* stage, Body&& body) {
    try {
        std::forward<Body>(body)();
    } catch (Error& e) {
        e.add_context(stage);
        throw;
    }
}

std::string method_slug(estimators::EstimatorKind kind) {
    std::string slug = estimators::kind_name(kind);
    for (char& c : slug) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return slug;
}

void require_file(const std::filesystem::path& path, const std::string& hint) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing " + path.string() + " (" + hint + ")");
    }
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void write_json(const ordered_json& j, const std::filesystem::path& path) {
    write_text(j.dump(2) + "\n", path);
}

ordered_json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

double json_double(const ordered_json& j, const char* key,
                   const std::filesystem::path& path) {
    try {
        return j.at(key).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": field '" + key + "': " + e.what());
    }
}

thermal::TransformerParams load_params(const config::RunConfig& config) {
    if (config.params_file.empty()) return thermal::TransformerParams{};
    return config::read_params_file(config.params_file);
}

/// Loads the manifest if present and checks it was produced by this config;
/// returns a fresh skeleton otherwise.
ordered_json open_manifest(const OutputLayout& layout, const config::RunConfig& config,
                           const thermal::TransformerParams& params) {
    const std::string want_config = config::config_hash(config);
    const std::string want_params = config::params_hash(params);
    if (std::filesystem::exists(layout.manifest())) {
        ordered_json m = parse_json_file(layout.manifest());
        const std::string have_config = m.value("config_hash", "");
        const std::string have_params = m.value("params_hash", "");
        const std::uint64_t have_seed = m.value("seed", std::uint64_t{0});
        if (have_seed != config.seed || have_config != want_config ||
            have_params != want_params) {
            throw ConfigError(layout.dir.string() +
                              " was produced with a different seed or config; "
                              "use a fresh --out or the original settings");
        }
        if (!m.contains("stages") || !m["stages"].is_object()) {
            m["stages"] = ordered_json::object();
        }
        return m;
    }
    ordered_json m;
    m["format_version"] = kManifestVersion;
    m["seed"] = config.seed;
    m["config_hash"] = want_config;
    m["params_hash"] = want_params;
    m["stages"] = ordered_json::object();
    return m;
}

/// Verifies manifest identity, records the stage entry and writes the file.
/// Called after a stage's artifacts are safely on disk.
void record_stage(const OutputLayout& layout, const config::RunConfig& config,
                  const thermal::TransformerParams& params, const std::string& stage,
                  ordered_json fields) {
    ordered_json m = open_manifest(layout, config, params);
    m["stages"][stage] = std::move(fields);
    write_json(m, layout.manifest());
}

/// Identity check before a stage writes anything, so a rerun with different
/// settings fails cleanly instead of clobbering the directory's artifacts.
void require_same_run(const OutputLayout& layout, const config::RunConfig& config,
                      const thermal::TransformerParams& params) {
    open_manifest(layout, config, params);
}

synthesis::Dataset load_dataset(const config::RunConfig& config,
                                const OutputLayout& layout) {
    require_file(layout.dataset_csv(), "run synthesize first");
    synthesis::Dataset ds = synthesis::read_dataset_csv(layout.dataset_csv());
    if (config.lagged_features) ds = synthesis::with_lagged_features(ds);
    return ds;
}

struct SplitView {
    std::vector<std::int64_t> hours;
    std::vector<double> rows;
    std::vector<double> targets;
};

SplitView take_split(const synthesis::Dataset& ds, synthesis::SplitTag tag) {
    SplitView view;
    for (std::size_t i = 0; i < ds.targets.size(); ++i) {
        if (ds.split[i] != tag) continue;
        view.hours.push_back(ds.hours[i]);
        for (std::size_t k = 0; k < ds.feature_dim; ++k) {
            view.rows.push_back(ds.features[i * ds.feature_dim + k]);
        }
        view.targets.push_back(ds.targets[i]);
    }
    return view;
}

estimators::EstimatorModel load_model_file(const OutputLayout& layout,
                                           estimators::EstimatorKind kind) {
    const std::filesystem::path path = layout.model(kind);
    require_file(path, "run train --method " + method_slug(kind) + " first");
    return estimators::load_model(path);
}

fusion::OwaWeights load_owa_file(const std::filesystem::path& path,
                                 double* train_objective) {
    require_file(path, "run fuse --method owa first");
    const ordered_json j = parse_json_file(path);
    if (j.value("format_version", -1) != kFusionVersion) {
        throw SchemaError(path.string() + ": unsupported format_version");
    }
    const fusion::OwaWeights weights{json_double(j, "c1", path),
                                     json_double(j, "c2", path)};
    fusion::validate(weights);
    if (train_objective) *train_objective = json_double(j, "train_objective", path);
    return weights;
}

fusion::KalmanConfig load_kalman_file(const std::filesystem::path& path) {
    require_file(path, "run fuse --method kalman first");
    const ordered_json j = parse_json_file(path);
    if (j.value("format_version", -1) != kFusionVersion) {
        throw SchemaError(path.string() + ": unsupported format_version");
    }
    fusion::KalmanConfig cfg;
    cfg.a = json_double(j, "a", path);
    cfg.b = json_double(j, "b", path);
    cfg.h = json_double(j, "h", path);
    cfg.q = json_double(j, "q", path);
    cfg.e_anfis = json_double(j, "e_anfis", path);
    cfg.e_rbf = json_double(j, "e_rbf", path);
    cfg.x0 = json_double(j, "x0", path);
    cfg.p0 = json_double(j, "p0", path);
    fusion::validate(cfg);
    return cfg;
}

ordered_json kalman_to_json(const fusion::KalmanConfig& cfg) {
    ordered_json j;
    j["format_version"] = kFusionVersion;
    j["a"] = cfg.a;
    j["b"] = cfg.b;
    j["h"] = cfg.h;
    j["q"] = cfg.q;
    j["e_anfis"] = cfg.e_anfis;
    j["e_rbf"] = cfg.e_rbf;
    j["x0"] = cfg.x0;
    j["p0"] = cfg.p0;
    return j;
}

}  // namespace

SeedPlan seed_plan(std::uint64_t seed) {
    return SeedPlan{seed + 1, seed + 2, seed + 3, seed + 4, seed + 5, seed + 6};
}

OutputLayout layout_for(const config::RunConfig& config) {
    return OutputLayout{std::filesystem::path(config.out_dir)};
}

std::filesystem::path OutputLayout::model(estimators::EstimatorKind kind) const {
    return dir / ("model_" + method_slug(kind) + ".json");
}

ArtifactTracker::~ArtifactTracker() {
    if (committed_) return;
    for (const auto& path : paths_) {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
}

void ArtifactTracker::add(const std::filesystem::path& path) {
    paths_.push_back(path);
}

void ArtifactTracker::commit() { committed_ = true; }

void cmd_params_init(const std::filesystem::path& out_path, bool force) {
    run_stage("params-init", [&] {
        if (std::filesystem::exists(out_path) && !force) {
            throw IoError("refusing to overwrite " + out_path.string() +
                          " (pass --force to replace it)");
        }
        if (out_path.has_parent_path()) {
            std::filesystem::create_directories(out_path.parent_path());
        }
        config::write_params_file(thermal::TransformerParams{}, out_path);
    });
}

void cmd_synthesize(const config::RunConfig& config) {
    run_stage("synthesize", [&] {
        config::validate(config);
        const thermal::TransformerParams params = load_params(config);
        const OutputLayout layout = layout_for(config);
        require_same_run(layout, config, params);
        const SeedPlan seeds = seed_plan(config.seed);

        synthesis::HourlyProfile profile;
        if (config.profile_csv.empty()) {
            profile = synthesis::generate_profile(config.hours, config.profile,
                                                  seeds.profile);
        } else {
            profile = synthesis::read_profile_csv(config.profile_csv);
        }
        synthesis::Dataset ds = synthesis::synthesize_targets(profile, params);
        ds = synthesis::split_dataset(ds, config.train_fraction, seeds.split);

        std::filesystem::create_directories(layout.dir);
        ArtifactTracker tracker;
        tracker.add(layout.dataset_csv());
        synthesis::write_dataset_csv(ds, layout.dataset_csv());

        ordered_json fields;
        fields["rows"] = ds.targets.size();
        fields["train_rows"] = synthesis::count_split(ds, synthesis::SplitTag::Train);
        fields["test_rows"] = synthesis::count_split(ds, synthesis::SplitTag::Test);
        record_stage(layout, config, params, "synthesize", std::move(fields));
        tracker.commit();
    });
}

void cmd_train(const config::RunConfig& config, estimators::EstimatorKind kind) {
    const std::string stage = "train-" + method_slug(kind);
    run_stage(stage.c_str(), [&] {
        config::validate(config);
        const thermal::TransformerParams params = load_params(config);
        const SeedPlan seeds = seed_plan(config.seed);
        const OutputLayout layout = layout_for(config);
        require_same_run(layout, config, params);

        const synthesis::Dataset ds = load_dataset(config, layout);
        const SplitView train = take_split(ds, synthesis::SplitTag::Train);

        estimators::EstimatorModel model;
        switch (kind) {
            case estimators::EstimatorKind::Rbf: {
                estimators::RbfConfig rbf = config.rbf;
                rbf.seed = seeds.rbf;
                model = estimators::train_rbf(train.rows, ds.feature_dim,
                                              train.targets, rbf);
                break;
            }
            case estimators::EstimatorKind::Anfis: {
                estimators::AnfisConfig anfis = config.anfis;
                anfis.seed = seeds.anfis;
                model = estimators::train_anfis(train.rows, ds.feature_dim,
                                                train.targets, anfis);
                break;
            }
            case estimators::EstimatorKind::Mlp: {
                estimators::MlpConfig mlp = config.mlp;
                mlp.seed = seeds.mlp;
                model = estimators::train_mlp(train.rows, ds.feature_dim,
                                              train.targets, mlp);
                break;
            }
        }

        ArtifactTracker tracker;
        tracker.add(layout.model(kind));
        estimators::save_model(model, layout.model(kind));

        ordered_json fields;
        fields["train_rows"] = train.targets.size();
        fields["train_mse"] = model.train_mse_history.back();
        record_stage(layout, config, params, stage, std::move(fields));
        tracker.commit();
    });
}

void cmd_fuse_owa(const config::RunConfig& config) {
    run_stage("fuse-owa", [&] {
        config::validate(config);
        const thermal::TransformerParams params = load_params(config);
        const SeedPlan seeds = seed_plan(config.seed);
        const OutputLayout layout = layout_for(config);
        require_same_run(layout, config, params);

        const synthesis::Dataset ds = load_dataset(config, layout);
        const SplitView train = take_split(ds, synthesis::SplitTag::Train);
        const estimators::EstimatorModel anfis =
            load_model_file(layout, estimators::EstimatorKind::Anfis);
        const estimators::EstimatorModel rbf =
            load_model_file(layout, estimators::EstimatorKind::Rbf);

        const std::vector<double> yhat = estimators::predict_many(anfis, train.rows);
        const std::vector<double> ohat = estimators::predict_many(rbf, train.rows);

        fusion::GaConfig ga = config.ga;
        ga.seed = seeds.ga;
        const fusion::OwaWeights weights =
            fusion::optimize_owa_weights(yhat, ohat, train.targets, ga);
        const double objective = fusion::owa_objective(weights, yhat, ohat, train.targets);

        ordered_json j;
        j["format_version"] = kFusionVersion;
        j["c1"] = weights.c1;
        j["c2"] = weights.c2;
        j["train_objective"] = objective;
        j["ga"] = {{"population", ga.population},
                   {"generations", ga.generations},
                   {"crossover_rate", ga.crossover_rate},
                   {"mutation_rate", ga.mutation_rate},
                   {"mutation_scale", ga.mutation_scale},
                   {"seed", ga.seed}};

        ArtifactTracker tracker;
        tracker.add(layout.fusion_owa());
        write_json(j, layout.fusion_owa());

        ordered_json fields;
        fields["c1"] = weights.c1;
        fields["c2"] = weights.c2;
        fields["train_objective"] = objective;
        record_stage(layout, config, params, "fuse-owa", std::move(fields));
        tracker.commit();
    });
}

void cmd_fuse_kalman(const config::RunConfig& config) {
    run_stage("fuse-kalman", [&] {
        config::validate(config);
        const thermal::TransformerParams params = load_params(config);
        const OutputLayout layout = layout_for(config);
        require_same_run(layout, config, params);

        const synthesis::Dataset ds = load_dataset(config, layout);
        const SplitView train = take_split(ds, synthesis::SplitTag::Train);
        const SplitView test = take_split(ds, synthesis::SplitTag::Test);
        const estimators::EstimatorModel anfis =
            load_model_file(layout, estimators::EstimatorKind::Anfis);
        const estimators::EstimatorModel rbf =
            load_model_file(layout, estimators::EstimatorKind::Rbf);

        const std::vector<double> yhat_train =
            estimators::predict_many(anfis, train.rows);
        const std::vector<double> ohat_train = estimators::predict_many(rbf, train.rows);
        const double e_anfis =
            fusion::estimate_measurement_noise(yhat_train, train.targets);
        const double e_rbf = fusion::estimate_measurement_noise(ohat_train, train.targets);
        const std::vector<double> yhat_test = estimators::predict_many(anfis, test.rows);
        if (yhat_test.empty()) {
            throw EmptyInputError("test split has no rows");
        }

        fusion::KalmanConfig cfg;  // a = h = 1, b = 0
        cfg.e_anfis = e_anfis;
        cfg.e_rbf = e_rbf;
        cfg.x0 = yhat_train.front();
        cfg.p0 = e_anfis;
        cfg.q = config.kalman_q_scale *
                fusion::optimize_process_noise(yhat_train, ohat_train, train.hours,
                                               train.targets, cfg);
        cfg.x0 = yhat_test.front();
        fusion::validate(cfg);

        ArtifactTracker tracker;
        tracker.add(layout.fusion_kalman());
        write_json(kalman_to_json(cfg), layout.fusion_kalman());

        ordered_json fields;
        fields["e_anfis"] = e_anfis;
        fields["e_rbf"] = e_rbf;
        fields["q"] = cfg.q;
        record_stage(layout, config, params, "fuse-kalman", std::move(fields));
        tracker.commit();
    });
}

void cmd_evaluate(const config::RunConfig& config) {
    run_stage("evaluate", [&] {
        config::validate(config);
        const thermal::TransformerParams params = load_params(config);
        const OutputLayout layout = layout_for(config);
        require_same_run(layout, config, params);

        const synthesis::Dataset ds = load_dataset(config, layout);
        const SplitView test = take_split(ds, synthesis::SplitTag::Test);
        if (test.targets.empty()) {
            throw EmptyInputError("test split has no rows");
        }

        const estimators::EstimatorModel anfis =
            load_model_file(layout, estimators::EstimatorKind::Anfis);
        const estimators::EstimatorModel rbf =
            load_model_file(layout, estimators::EstimatorKind::Rbf);
        const estimators::EstimatorModel mlp =
            load_model_file(layout, estimators::EstimatorKind::Mlp);
        double owa_train_objective = 0.0;
        const fusion::OwaWeights weights =
            load_owa_file(layout.fusion_owa(), &owa_train_objective);
        const fusion::KalmanConfig kalman = load_kalman_file(layout.fusion_kalman());

        const std::vector<double> yhat = estimators::predict_many(anfis, test.rows);
        const std::vector<double> ohat = estimators::predict_many(rbf, test.rows);
        const std::vector<double> mhat = estimators::predict_many(mlp, test.rows);
        const std::vector<double> owa = fusion::owa_fuse_series(weights, yhat, ohat);
        const std::vector<double> fused =
            fusion::sequential_kalman_fuse(yhat, ohat, test.hours, kalman);

        const auto score = [&](const std::string& name,
                               const std::vector<double>& preds) {
            return metrics::MethodReport{name, metrics::mse(preds, test.targets),
                                         metrics::r_squared(preds, test.targets), 0};
        };
        const std::vector<metrics::MethodReport> ranked = metrics::rank_methods(
            {score("ANFIS", yhat), score("RBF", ohat), score("MLP", mhat),
             score("OWA", owa), score("KALMAN", fused)});

        ordered_json report;
        report["format_version"] = kReportVersion;
        report["seed"] = config.seed;
        report["test_samples"] = test.targets.size();
        report["methods"] = ordered_json::array();
        for (const metrics::MethodReport& r : ranked) {
            report["methods"].push_back({{"method", r.method},
                                         {"category", metrics::method_category(r.method)},
                                         {"mse", r.mse},
                                         {"r2", r.r2},
                                         {"rank", r.rank}});
        }
        report["owa"] = {{"c1", weights.c1},
                         {"c2", weights.c2},
                         {"train_objective", owa_train_objective}};
        report["kalman"] = kalman_to_json(kalman);
        report["kalman"].erase("format_version");

        std::string table = "Transformer loss-of-life estimation, test-split ranking\n";
        table += "seed: " + std::to_string(config.seed) + "\n";
        table += "test samples: " + std::to_string(test.targets.size()) + "\n\n";
        table += metrics::format_table(ranked);

        std::string comparison = "hour,target,anfis,rbf,owa,kalman\n";
        for (std::size_t i = 0; i < test.targets.size(); ++i) {
            comparison += csv::format_int(test.hours[i]);
            comparison += ',';
            comparison += csv::format_double(test.targets[i]);
            comparison += ',';
            comparison += csv::format_double(yhat[i]);
            comparison += ',';
            comparison += csv::format_double(ohat[i]);
            comparison += ',';
            comparison += csv::format_double(owa[i]);
            comparison += ',';
            comparison += csv::format_double(fused[i]);
            comparison += '\n';
        }

        // actual vs best-fused trace for external plotting, first 50 samples
        std::string plot = "hour,actual,fused,error\n";
        const std::size_t plot_rows = std::min(kPlotSamples, test.targets.size());
        for (std::size_t i = 0; i < plot_rows; ++i) {
            plot += csv::format_int(test.hours[i]);
            plot += ',';
            plot += csv::format_double(test.targets[i]);
            plot += ',';
            plot += csv::format_double(fused[i]);
            plot += ',';
            plot += csv::format_double(test.targets[i] - fused[i]);
            plot += '\n';
        }

        ArtifactTracker tracker;
        tracker.add(layout.report_json());
        write_json(report, layout.report_json());
        tracker.add(layout.report_txt());
        write_text(table, layout.report_txt());
        tracker.add(layout.comparison_csv());
        write_text(comparison, layout.comparison_csv());
        tracker.add(layout.plot_data_csv());
        write_text(plot, layout.plot_data_csv());

        ordered_json fields;
        fields["best_method"] = ranked.front().method;
        fields["best_mse"] = ranked.front().mse;
        record_stage(layout, config, params, "evaluate", std::move(fields));
        tracker.commit();
    });
}

void cmd_run_all(const config::RunConfig& config) {
    cmd_synthesize(config);
    cmd_train(config, estimators::EstimatorKind::Anfis);
    cmd_train(config, estimators::EstimatorKind::Rbf);
    cmd_train(config, estimators::EstimatorKind::Mlp);
    cmd_fuse_owa(config);
    cmd_fuse_kalman(config);
    cmd_evaluate(config);
}

}  // namespace txlife::pipeline
