#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "txlife/config.hpp"
#include "txlife/estimators.hpp"
#include "txlife/fusion.hpp"
#include "txlife/metrics.hpp"
#include "txlife/synthesis.hpp"

namespace txlife::pipeline {

/// Per-stage seeds derived from the global seed by fixed offsets, so a stage
/// rerun in isolation consumes exactly the stream it saw inside run-all.
struct SeedPlan {
    std::uint64_t profile;
    std::uint64_t split;
    std::uint64_t rbf;
    std::uint64_t anfis;
    std::uint64_t mlp;
    std::uint64_t ga;
};

SeedPlan seed_plan(std::uint64_t seed);

/// Artifact locations under one output directory.
struct OutputLayout {
    std::filesystem::path dir;

    std::filesystem::path params_file() const { return dir / "params.txt"; }
    std::filesystem::path dataset_csv() const { return dir / "dataset.csv"; }
    std::filesystem::path manifest() const { return dir / "manifest.json"; }
    std::filesystem::path model(estimators::EstimatorKind kind) const;
    std::filesystem::path fusion_owa() const { return dir / "fusion_owa.json"; }
    std::filesystem::path fusion_kalman() const { return dir / "fusion_kalman.json"; }
    std::filesystem::path report_json() const { return dir / "report.json"; }
    std::filesystem::path report_txt() const { return dir / "report.txt"; }
    std::filesystem::path comparison_csv() const { return dir / "comparison.csv"; }
    std::filesystem::path plot_data_csv() const { return dir / "plot_data.csv"; }
};

OutputLayout layout_for(const config::RunConfig& config);

/// Removes the files registered with it unless commit() ran first; stages
/// use it so a failure never leaves partial artifacts behind.
class ArtifactTracker {
public:
    ArtifactTracker() = default;
    ArtifactTracker(const ArtifactTracker&) = delete;
    ArtifactTracker& operator=(const ArtifactTracker&) = delete;
    ~ArtifactTracker();

    void add(const std::filesystem::path& path);
    void commit();

private:
    std::vector<std::filesystem::path> paths_;
    bool committed_ = false;
};

/// Writes the default transformer parameter file. Refuses to overwrite an
/// existing file unless force is set.
void cmd_params_init(const std::filesystem::path& out_path, bool force);

/// Generates (or loads) the hourly profile, runs the thermal recursion,
/// splits train/test and writes dataset.csv plus the manifest.
void cmd_synthesize(const config::RunConfig& config);

/// Trains one estimator on the train split of dataset.csv and writes
/// model_<method>.json.
void cmd_train(const config::RunConfig& config, estimators::EstimatorKind kind);

/// OWA leg: GA-optimizes the stream weights on the train split and writes
/// fusion_owa.json.
void cmd_fuse_owa(const config::RunConfig& config);

/// Kalman leg: estimates per-stream measurement noise on the train split,
/// derives (x0, p0, q) and writes fusion_kalman.json.
void cmd_fuse_kalman(const config::RunConfig& config);

/// Scores all five methods on the test split and writes report.json,
/// report.txt, comparison.csv and plot_data.csv.
void cmd_evaluate(const config::RunConfig& config);

/// synthesize -> train x3 -> fuse owa -> fuse kalman -> evaluate.
void cmd_run_all(const config::RunConfig& config);

}  // namespace txlife::pipeline
