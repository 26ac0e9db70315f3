#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace txlife::estimators {

/// Per-dimension affine map fitted from data: x' = (x - offset) * scale with
/// scale = 1 / (max - min), so fitted columns land in [0, 1]. A constant
/// column gets scale 1 (map stays invertible and the column lands at 0).
struct AffineScaler {
    std::vector<double> offset;
    std::vector<double> scale;

    static AffineScaler fit(std::span<const double> rows, std::size_t dim);

    std::size_t dim() const { return offset.size(); }
    std::vector<double> transform(std::span<const double> rows) const;
    std::vector<double> inverse(std::span<const double> rows) const;
};

enum class EstimatorKind : std::uint8_t { Anfis, Rbf, Mlp };

std::string kind_name(EstimatorKind kind);

/// Gaussian basis network: k centers in scaled feature space, one width per
/// center, and k+1 linear output coefficients (trailing bias).
struct RbfParams {
    std::size_t dim = 0;
    std::size_t center_count = 0;
    std::vector<double> centers;  ///< center_count x dim, row-major
    std::vector<double> widths;   ///< center_count, all > 0
    std::vector<double> weights;  ///< center_count + 1
};

/// First-order Takagi-Sugeno system over a grid partition of Gaussian
/// membership functions; rule count = mfs_per_input ^ dim.
struct AnfisParams {
    std::size_t dim = 0;
    std::size_t mfs_per_input = 0;
    std::vector<double> mf_centers;  ///< dim x mfs_per_input, row-major
    std::vector<double> mf_widths;   ///< dim x mfs_per_input, all > 0
    std::vector<double> consequents;  ///< rules x (dim+1), row-major
};

/// One hidden tanh layer and a linear output unit.
struct MlpParams {
    std::size_t dim = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;  ///< hidden x dim, row-major
    std::vector<double> b1;  ///< hidden
    std::vector<double> w2;  ///< hidden
    double b2 = 0.0;
};

struct RbfConfig {
    std::size_t center_count = 25;
    double ridge = 1e-8;  ///< >= 0; applied to all output coefficients
    std::size_t kmeans_max_iters = 100;
    std::uint64_t seed = 0;
};

struct AnfisConfig {
    std::size_t mfs_per_input = 3;  ///< >= 2
    std::size_t epochs = 50;
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
};

struct MlpConfig {
    std::size_t hidden_units = 16;
    std::size_t epochs = 500;
    double learning_rate = 1e-2;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

void validate(const RbfConfig& config);
void validate(const AnfisConfig& config, std::size_t dim);
void validate(const MlpConfig& config);

/// A trained regressor: scalers fitted on the training rows, the
/// kind-specific parameter bundle, and the config that produced it (echoed
/// into the saved JSON). Immutable after training; predict is pure.
struct EstimatorModel {
    EstimatorKind kind = EstimatorKind::Rbf;
    AffineScaler feature_scaler;
    AffineScaler target_scaler;  ///< always 1-wide
    RbfParams rbf;
    AnfisParams anfis;
    MlpParams mlp;
    RbfConfig rbf_config;
    AnfisConfig anfis_config;
    MlpConfig mlp_config;
    /// Training curve in original target units: one entry for RBF, one per
    /// epoch for MLP, one after the initial least-squares pass plus one per
    /// epoch for ANFIS. The final entry is recomputed through the public
    /// predict path, so it matches an external MSE of predict_many exactly.
    std::vector<double> train_mse_history;
};

/// Gaussian RBF training: k-means centers (seeded; equidistant points go to
/// the lowest center index, an emptied cluster is re-seeded to the point
/// farthest from its center), widths = distance to the nearest other center
/// floored at 1e-6 (1.0 for a single center), output coefficients by
/// ridge-regularized least squares. Deterministic per seed.
EstimatorModel train_rbf(std::span<const double> rows, std::size_t dim,
                         std::span<const double> targets, const RbfConfig& config);

/// Hybrid ANFIS training: membership functions start on an even grid over
/// the scaled per-feature range; each epoch solves the consequents by least
/// squares and then takes one gradient step on the premise parameters,
/// halving the step until the training MSE is non-increasing within 1e-12.
EstimatorModel train_anfis(std::span<const double> rows, std::size_t dim,
                           std::span<const double> targets,
                           const AnfisConfig& config);

/// Mini-batch gradient descent on MSE with fan-in-scaled uniform init.
/// Throws DivergenceError naming the epoch if the loss leaves the finite
/// range. Deterministic per seed.
EstimatorModel train_mlp(std::span<const double> rows, std::size_t dim,
                         std::span<const double> targets, const MlpConfig& config);

/// Scales the row, evaluates the network, and maps the output back to
/// original target units.
double predict(const EstimatorModel& model, std::span<const double> feature_row);
std::vector<double> predict_many(const EstimatorModel& model,
                                 std::span<const double> rows);

/// Batch-MSE gradient of a Takagi-Sugeno system with fixed consequents with
/// respect to all membership centers then all widths (2 * dim * M entries);
/// rows are summed in index order. Exposed for finite-difference checks.
std::vector<double> anfis_premise_gradient(
    std::span<const double> rows, std::size_t dim, std::span<const double> targets,
    std::span<const double> mf_centers, std::span<const double> mf_widths,
    std::size_t mfs_per_input, std::span<const double> consequents);

/// Batch-MSE backpropagation gradient, flattened as (w1, b1, w2, b2).
/// Exposed for finite-difference checks.
std::vector<double> mlp_gradient(const MlpParams& params,
                                 std::span<const double> rows,
                                 std::span<const double> targets);

/// Self-describing JSON document with a format_version field; load rejects
/// unknown versions and inconsistent shapes.
void save_model(const EstimatorModel& model, const std::filesystem::path& path);
EstimatorModel load_model(const std::filesystem::path& path);

}  // namespace txlife::estimators
