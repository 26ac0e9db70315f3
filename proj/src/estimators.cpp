#include "txlife/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "txlife/errors.hpp"
#include "txlife/kernels.hpp"
#include "txlife/metrics.hpp"
#include "txlife/rng.hpp"

namespace txlife::estimators {

namespace {

using nlohmann::ordered_json;

constexpr double kWidthFloor = 1e-6;   // RBF width floor, scaled space
constexpr double kMinMfWidth = 1e-4;   // ANFIS width clamp during training
constexpr double kAnfisRidge = 1e-12;  // keeps the consequent solve well-posed
constexpr int kMaxHalvings = 40;

void check_training_data(std::span<const double> rows, std::size_t dim,
                         std::span<const double> targets) {
    if (dim == 0) {
        throw InvalidInputError("feature dimension must be >= 1");
    }
    if (rows.size() % dim != 0) {
        throw ShapeError("feature block of " + std::to_string(rows.size()) +
                         " values is not a multiple of dim " + std::to_string(dim));
    }
    const std::size_t n = rows.size() / dim;
    if (n == 0) {
        throw EmptyInputError("no training rows");
    }
    if (n != targets.size()) {
        throw ShapeError(std::to_string(n) + " feature rows vs " +
                         std::to_string(targets.size()) + " targets");
    }
    for (const double v : rows) {
        if (!std::isfinite(v)) throw InvalidInputError("non-finite feature value");
    }
    for (const double v : targets) {
        if (!std::isfinite(v)) throw InvalidInputError("non-finite target value");
    }
}

std::vector<double> solve_ridge(const std::vector<double>& design, std::size_t n,
                                std::size_t p, std::span<const double> y,
                                double ridge) {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    if (ridge > 0.0) {
        a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + p),
                                  static_cast<Eigen::Index>(p));
        b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + p));
        const double root = std::sqrt(ridge);
        for (std::size_t j = 0; j < p; ++j) {
            a(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(j)) = root;
        }
    } else {
        a.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        b.resize(static_cast<Eigen::Index>(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                design[i * p + j];
        }
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::VectorXd w = qr.solve(b);
    std::vector<double> out(p);
    for (std::size_t j = 0; j < p; ++j) {
        out[j] = w(static_cast<Eigen::Index>(j));
    }
    return out;
}

double dot_rows_mse(const std::vector<double>& design, std::size_t n, std::size_t p,
                    std::span<const double> coef, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            f += design[i * p + j] * coef[j];
        }
        const double e = f - y[i];
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

/// Training-curve entries are kept in original target units: a scaled-space
/// error e' maps back as e'/scale, so MSE divides by scale^2.
double to_original_mse(double scaled_mse, const AffineScaler& target_scaler) {
    const double s = target_scaler.scale[0];
    return scaled_mse / (s * s);
}

std::size_t model_dim(const EstimatorModel& model) {
    switch (model.kind) {
        case EstimatorKind::Rbf: return model.rbf.dim;
        case EstimatorKind::Anfis: return model.anfis.dim;
        case EstimatorKind::Mlp: return model.mlp.dim;
    }
    return 0;
}

void finalize_history(EstimatorModel& model, std::span<const double> rows,
                      std::span<const double> targets) {
    const std::vector<double> preds = predict_many(model, rows);
    model.train_mse_history.back() = metrics::mse(preds, targets);
}

}  // namespace

AffineScaler AffineScaler::fit(std::span<const double> rows, std::size_t dim) {
    if (dim == 0) {
        throw InvalidInputError("scaler dimension must be >= 1");
    }
    if (rows.empty() || rows.size() % dim != 0) {
        throw ShapeError("scaler input of " + std::to_string(rows.size()) +
                         " values is not a nonempty multiple of dim " +
                         std::to_string(dim));
    }
    const std::size_t n = rows.size() / dim;
    AffineScaler scaler;
    scaler.offset.resize(dim);
    scaler.scale.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = rows[d];
        double hi = rows[d];
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, rows[i * dim + d]);
            hi = std::max(hi, rows[i * dim + d]);
        }
        scaler.offset[d] = lo;
        scaler.scale[d] = hi > lo ? 1.0 / (hi - lo) : 1.0;
    }
    return scaler;
}

std::vector<double> AffineScaler::transform(std::span<const double> rows) const {
    const std::size_t d = dim();
    if (d == 0 || rows.size() % d != 0) {
        throw ShapeError("transform input does not match scaler dimension " +
                         std::to_string(d));
    }
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t c = i % d;
        out[i] = (rows[i] - offset[c]) * scale[c];
    }
    return out;
}

std::vector<double> AffineScaler::inverse(std::span<const double> rows) const {
    const std::size_t d = dim();
    if (d == 0 || rows.size() % d != 0) {
        throw ShapeError("inverse input does not match scaler dimension " +
                         std::to_string(d));
    }
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t c = i % d;
        out[i] = rows[i] / scale[c] + offset[c];
    }
    return out;
}

std::string kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Anfis: return "ANFIS";
        case EstimatorKind::Rbf: return "RBF";
        case EstimatorKind::Mlp: return "MLP";
    }
    throw InvalidInputError("unknown estimator kind");
}

void validate(const RbfConfig& config) {
    if (config.center_count == 0) {
        throw ConfigError("rbf center_count must be >= 1");
    }
    if (!std::isfinite(config.ridge) || config.ridge < 0.0) {
        throw ConfigError("rbf ridge must be finite and >= 0");
    }
    if (config.kmeans_max_iters == 0) {
        throw ConfigError("rbf kmeans_max_iters must be >= 1");
    }
}

void validate(const AnfisConfig& config, std::size_t dim) {
    if (config.mfs_per_input < 2) {
        throw ConfigError("anfis mfs_per_input must be >= 2");
    }
    if (config.epochs == 0) {
        throw ConfigError("anfis epochs must be >= 1");
    }
    if (!std::isfinite(config.learning_rate) || !(config.learning_rate > 0.0)) {
        throw ConfigError("anfis learning_rate must be finite and > 0");
    }
    if (dim == 0) {
        throw InvalidInputError("feature dimension must be >= 1");
    }
    if (dim * config.mfs_per_input > 64) {
        throw ConfigError("anfis grid too large: dim * mfs_per_input must be <= 64");
    }
    std::size_t rules = 1;
    for (std::size_t d = 0; d < dim; ++d) {
        rules *= config.mfs_per_input;
        if (rules > 1024) {
            throw ConfigError("rule explosion: mfs_per_input^dim exceeds 1024 rules");
        }
    }
}

void validate(const MlpConfig& config) {
    if (config.hidden_units == 0) {
        throw ConfigError("mlp hidden_units must be >= 1");
    }
    if (config.epochs == 0) {
        throw ConfigError("mlp epochs must be >= 1");
    }
    if (!std::isfinite(config.learning_rate) || !(config.learning_rate > 0.0)) {
        throw ConfigError("mlp learning_rate must be finite and > 0");
    }
    if (config.batch_size == 0) {
        throw ConfigError("mlp batch_size must be >= 1");
    }
}

EstimatorModel train_rbf(std::span<const double> rows, std::size_t dim,
                         std::span<const double> targets, const RbfConfig& config) {
    validate(config);
    check_training_data(rows, dim, targets);
    const std::size_t n = targets.size();
    const std::size_t k = config.center_count;
    if (n < k) {
        throw InvalidInputError("rbf needs at least as many training rows (" +
                                std::to_string(n) + ") as centers (" +
                                std::to_string(k) + ")");
    }
    bool all_identical = true;
    for (std::size_t i = 1; i < n && all_identical; ++i) {
        all_identical = std::memcmp(rows.data(), rows.data() + i * dim,
                                    dim * sizeof(double)) == 0;
    }
    if (all_identical) {
        throw DegenerateDataError("all training rows are identical");
    }

    EstimatorModel model;
    model.kind = EstimatorKind::Rbf;
    model.rbf_config = config;
    model.feature_scaler = AffineScaler::fit(rows, dim);
    model.target_scaler = AffineScaler::fit(targets, 1);
    const std::vector<double> x = model.feature_scaler.transform(rows);
    const std::vector<double> y = model.target_scaler.transform(targets);
    const kernels::Backend backend = kernels::default_backend();

    // k-means: seeded start, stable-assignment stop, empty clusters re-seeded
    // to the point currently farthest from its center.
    Rng rng(config.seed);
    std::vector<double> centers(k * dim);
    {
        const std::vector<std::size_t> pick = rng.sample_without_replacement(n, k);
        for (std::size_t c = 0; c < k; ++c) {
            std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(pick[c] * dim), dim,
                        centers.begin() + static_cast<std::ptrdiff_t>(c * dim));
        }
    }
    std::vector<std::uint32_t> assign(n);
    std::vector<std::uint32_t> prev_assign;
    std::vector<double> dist2(n);
    std::vector<std::size_t> counts(k);
    std::vector<double> sums(k * dim);
    for (std::size_t iter = 0; iter < config.kmeans_max_iters; ++iter) {
        kernels::nearest_center(x, dim, centers, k, assign, dist2, backend);
        if (!prev_assign.empty() && assign == prev_assign) break;

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
        }
        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (dist2[i] > dist2[far]) far = i;
            }
            std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(far * dim), dim,
                        centers.begin() + static_cast<std::ptrdiff_t>(c * dim));
            dist2[far] = -1.0;  // not eligible for another empty cluster this pass
            reseeded = true;
        }
        if (reseeded) {
            prev_assign.clear();
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                sums[assign[i] * dim + d] += x[i * dim + d];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t d = 0; d < dim; ++d) {
                centers[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
            }
        }
        prev_assign = assign;
    }

    std::vector<double> widths(k);
    for (std::size_t c = 0; c < k; ++c) {
        double best = -1.0;
        for (std::size_t other = 0; other < k; ++other) {
            if (other == c) continue;
            double d2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = centers[c * dim + d] - centers[other * dim + d];
                d2 += diff * diff;
            }
            if (best < 0.0 || d2 < best) best = d2;
        }
        widths[c] = best < 0.0 ? 1.0 : std::max(std::sqrt(best), kWidthFloor);
    }

    std::vector<double> design(n * (k + 1));
    kernels::gaussian_design(x, dim, centers, widths, design, backend);
    model.rbf.dim = dim;
    model.rbf.center_count = k;
    model.rbf.centers = std::move(centers);
    model.rbf.widths = std::move(widths);
    model.rbf.weights = solve_ridge(design, n, k + 1, y, config.ridge);

    model.train_mse_history.assign(1, 0.0);
    finalize_history(model, rows, targets);
    return model;
}

namespace {

struct AnfisWork {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t mfs = 0;
    std::size_t rules = 0;
    std::size_t p = 0;  // rules * (dim + 1)
    std::vector<double> design;

    double lse_and_mse(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& centers,
                       const std::vector<double>& widths,
                       std::vector<double>& consequents) {
        kernels::anfis_design_matrix(x, dim, centers, widths, mfs, design, {},
                                     kernels::default_backend());
        consequents = solve_ridge(design, n, p, y, kAnfisRidge);
        return dot_rows_mse(design, n, p, consequents, y);
    }

    double mse_only(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& centers,
                    const std::vector<double>& widths,
                    const std::vector<double>& consequents) {
        kernels::anfis_design_matrix(x, dim, centers, widths, mfs, design, {},
                                     kernels::default_backend());
        return dot_rows_mse(design, n, p, consequents, y);
    }
};

}  // namespace

EstimatorModel train_anfis(std::span<const double> rows, std::size_t dim,
                           std::span<const double> targets,
                           const AnfisConfig& config) {
    validate(config, dim);
    check_training_data(rows, dim, targets);
    const std::size_t n = targets.size();
    const std::size_t rules = kernels::anfis_rule_count(dim, config.mfs_per_input);
    if (rules * 2 > n) {
        throw ConfigError("rule explosion: " + std::to_string(rules) +
                          " rules need more than " + std::to_string(rules * 2) +
                          " training rows, got " + std::to_string(n));
    }

    EstimatorModel model;
    model.kind = EstimatorKind::Anfis;
    model.anfis_config = config;
    model.feature_scaler = AffineScaler::fit(rows, dim);
    model.target_scaler = AffineScaler::fit(targets, 1);
    const std::vector<double> x = model.feature_scaler.transform(rows);
    const std::vector<double> y = model.target_scaler.transform(targets);

    // Even grid over the scaled per-feature range; adjacent memberships cross
    // at half maximum (width = spacing / (2 sqrt(2 ln 2))).
    const std::size_t m = config.mfs_per_input;
    std::vector<double> mf_centers(dim * m);
    std::vector<double> mf_widths(dim * m);
    const double hwhm = 2.0 * std::sqrt(2.0 * std::log(2.0));
    for (std::size_t d = 0; d < dim; ++d) {
        double lo = x[d];
        double hi = x[d];
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, x[i * dim + d]);
            hi = std::max(hi, x[i * dim + d]);
        }
        const double range = hi - lo;
        const double spacing = range > 0.0 ? range / static_cast<double>(m - 1) : 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            mf_centers[d * m + j] = lo + spacing * static_cast<double>(j);
            mf_widths[d * m + j] = range > 0.0 ? spacing / hwhm : 1.0;
        }
    }

    AnfisWork work;
    work.n = n;
    work.dim = dim;
    work.mfs = m;
    work.rules = rules;
    work.p = rules * (dim + 1);
    work.design.resize(n * work.p);

    std::vector<double> consequents;
    double mse_cur = work.lse_and_mse(x, y, mf_centers, mf_widths, consequents);
    model.train_mse_history.push_back(to_original_mse(mse_cur, model.target_scaler));

    double lr = config.learning_rate;
    const std::size_t dm = dim * m;
    std::vector<double> trial_centers(dm);
    std::vector<double> trial_widths(dm);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const std::vector<double> grad = anfis_premise_gradient(
            x, dim, y, mf_centers, mf_widths, m, consequents);
        for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
            for (std::size_t j = 0; j < dm; ++j) {
                trial_centers[j] = mf_centers[j] - lr * grad[j];
                trial_widths[j] =
                    std::max(mf_widths[j] - lr * grad[dm + j], kMinMfWidth);
            }
            const double mse_trial =
                work.mse_only(x, y, trial_centers, trial_widths, consequents);
            if (mse_trial <= mse_cur + 1e-15) {
                mf_centers = trial_centers;
                mf_widths = trial_widths;
                break;
            }
            lr *= 0.5;
        }
        mse_cur = work.lse_and_mse(x, y, mf_centers, mf_widths, consequents);
        model.train_mse_history.push_back(
            to_original_mse(mse_cur, model.target_scaler));
    }

    model.anfis.dim = dim;
    model.anfis.mfs_per_input = m;
    model.anfis.mf_centers = std::move(mf_centers);
    model.anfis.mf_widths = std::move(mf_widths);
    model.anfis.consequents = std::move(consequents);
    finalize_history(model, rows, targets);
    return model;
}

namespace {

struct MlpGrads {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

/// Batch-MSE backprop over the given row indices, accumulated in index order.
void mlp_batch_gradient(const MlpParams& p, std::span<const double> x,
                        std::span<const double> y,
                        std::span<const std::size_t> batch, MlpGrads& g) {
    const std::size_t h = p.hidden;
    const std::size_t dim = p.dim;
    g.w1.assign(h * dim, 0.0);
    g.b1.assign(h, 0.0);
    g.w2.assign(h, 0.0);
    g.b2 = 0.0;
    std::vector<double> act(h);
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (const std::size_t i : batch) {
        const double* row = x.data() + i * dim;
        double f = p.b2;
        for (std::size_t j = 0; j < h; ++j) {
            double z = p.b1[j];
            for (std::size_t d = 0; d < dim; ++d) {
                z += p.w1[j * dim + d] * row[d];
            }
            act[j] = std::tanh(z);
            f += p.w2[j] * act[j];
        }
        const double df = 2.0 * (f - y[i]) * inv;
        g.b2 += df;
        for (std::size_t j = 0; j < h; ++j) {
            g.w2[j] += df * act[j];
            const double dz = df * p.w2[j] * (1.0 - act[j] * act[j]);
            g.b1[j] += dz;
            for (std::size_t d = 0; d < dim; ++d) {
                g.w1[j * dim + d] += dz * row[d];
            }
        }
    }
}

double mlp_scaled_mse(const MlpParams& p, std::span<const double> x,
                      std::span<const double> y) {
    const std::size_t n = y.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.data() + i * p.dim;
        double f = p.b2;
        for (std::size_t j = 0; j < p.hidden; ++j) {
            double z = p.b1[j];
            for (std::size_t d = 0; d < p.dim; ++d) {
                z += p.w1[j * p.dim + d] * row[d];
            }
            f += p.w2[j] * std::tanh(z);
        }
        const double e = f - y[i];
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

}  // namespace

EstimatorModel train_mlp(std::span<const double> rows, std::size_t dim,
                         std::span<const double> targets, const MlpConfig& config) {
    validate(config);
    check_training_data(rows, dim, targets);
    const std::size_t n = targets.size();

    EstimatorModel model;
    model.kind = EstimatorKind::Mlp;
    model.mlp_config = config;
    model.feature_scaler = AffineScaler::fit(rows, dim);
    model.target_scaler = AffineScaler::fit(targets, 1);
    const std::vector<double> x = model.feature_scaler.transform(rows);
    const std::vector<double> y = model.target_scaler.transform(targets);

    MlpParams p;
    p.dim = dim;
    p.hidden = config.hidden_units;
    p.w1.resize(p.hidden * dim);
    p.b1.assign(p.hidden, 0.0);
    p.w2.resize(p.hidden);
    Rng rng(config.seed);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& w : p.w1) w = rng.uniform(-a1, a1);
    const double a2 = 1.0 / std::sqrt(static_cast<double>(p.hidden));
    for (auto& w : p.w2) w = rng.uniform(-a2, a2);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    MlpGrads g;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t len = std::min(config.batch_size, n - start);
            mlp_batch_gradient(p, x, y,
                               std::span<const std::size_t>(order).subspan(start, len),
                               g);
            for (std::size_t j = 0; j < p.w1.size(); ++j) {
                p.w1[j] -= config.learning_rate * g.w1[j];
            }
            for (std::size_t j = 0; j < p.hidden; ++j) {
                p.b1[j] -= config.learning_rate * g.b1[j];
                p.w2[j] -= config.learning_rate * g.w2[j];
            }
            p.b2 -= config.learning_rate * g.b2;
        }
        const double epoch_mse = mlp_scaled_mse(p, x, y);
        if (!std::isfinite(epoch_mse)) {
            throw DivergenceError("mlp training diverged at epoch " +
                                  std::to_string(epoch + 1));
        }
        model.train_mse_history.push_back(
            to_original_mse(epoch_mse, model.target_scaler));
    }

    model.mlp = std::move(p);
    finalize_history(model, rows, targets);
    return model;
}

double predict(const EstimatorModel& model, std::span<const double> feature_row) {
    const std::size_t dim = model_dim(model);
    if (feature_row.size() != dim) {
        throw ShapeError("feature row has " + std::to_string(feature_row.size()) +
                         " values, model expects " + std::to_string(dim));
    }
    return predict_many(model, feature_row)[0];
}

std::vector<double> predict_many(const EstimatorModel& model,
                                 std::span<const double> rows) {
    const std::size_t dim = model_dim(model);
    if (dim == 0) {
        throw InvalidInputError("model is untrained");
    }
    if (rows.empty() || rows.size() % dim != 0) {
        throw ShapeError("feature block of " + std::to_string(rows.size()) +
                         " values is not a nonempty multiple of dim " +
                         std::to_string(dim));
    }
    const std::size_t n = rows.size() / dim;
    const std::vector<double> x = model.feature_scaler.transform(rows);
    const kernels::Backend backend = kernels::default_backend();

    std::vector<double> scaled(n);
    switch (model.kind) {
        case EstimatorKind::Rbf: {
            const std::size_t p = model.rbf.center_count + 1;
            std::vector<double> design(n * p);
            kernels::gaussian_design(x, dim, model.rbf.centers, model.rbf.widths,
                                     design, backend);
            for (std::size_t i = 0; i < n; ++i) {
                double f = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    f += design[i * p + j] * model.rbf.weights[j];
                }
                scaled[i] = f;
            }
            break;
        }
        case EstimatorKind::Anfis: {
            const std::size_t rules =
                kernels::anfis_rule_count(dim, model.anfis.mfs_per_input);
            const std::size_t p = rules * (dim + 1);
            std::vector<double> design(n * p);
            kernels::anfis_design_matrix(x, dim, model.anfis.mf_centers,
                                         model.anfis.mf_widths,
                                         model.anfis.mfs_per_input, design, {},
                                         backend);
            for (std::size_t i = 0; i < n; ++i) {
                double f = 0.0;
                for (std::size_t j = 0; j < p; ++j) {
                    f += design[i * p + j] * model.anfis.consequents[j];
                }
                scaled[i] = f;
            }
            break;
        }
        case EstimatorKind::Mlp: {
            const std::size_t h = model.mlp.hidden;
            std::vector<double> act(n * h);
            kernels::tanh_projection(x, dim, model.mlp.w1, model.mlp.b1, act,
                                     backend);
            for (std::size_t i = 0; i < n; ++i) {
                double f = model.mlp.b2;
                for (std::size_t j = 0; j < h; ++j) {
                    f += act[i * h + j] * model.mlp.w2[j];
                }
                scaled[i] = f;
            }
            break;
        }
    }

    std::vector<double> out = model.target_scaler.inverse(scaled);
    for (const double v : out) {
        if (!std::isfinite(v)) {
            throw DivergenceError("prediction is not finite");
        }
    }
    return out;
}

std::vector<double> anfis_premise_gradient(
    std::span<const double> rows, std::size_t dim, std::span<const double> targets,
    std::span<const double> mf_centers, std::span<const double> mf_widths,
    std::size_t mfs_per_input, std::span<const double> consequents) {
    check_training_data(rows, dim, targets);
    const std::size_t n = targets.size();
    const std::size_t p_count = 2 * dim * mfs_per_input;
    std::vector<double> terms(n * p_count);
    std::vector<double> preds(n);
    kernels::anfis_gradient_terms(rows, dim, targets, mf_centers, mf_widths,
                                  mfs_per_input, consequents, terms, preds,
                                  kernels::default_backend());
    std::vector<double> grad(p_count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < p_count; ++p) {
            grad[p] += terms[i * p_count + p];
        }
    }
    return grad;
}

std::vector<double> mlp_gradient(const MlpParams& params,
                                 std::span<const double> rows,
                                 std::span<const double> targets) {
    check_training_data(rows, params.dim, targets);
    const std::size_t n = targets.size();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    MlpGrads g;
    mlp_batch_gradient(params, rows, targets, all, g);
    std::vector<double> flat;
    flat.reserve(g.w1.size() + g.b1.size() + g.w2.size() + 1);
    flat.insert(flat.end(), g.w1.begin(), g.w1.end());
    flat.insert(flat.end(), g.b1.begin(), g.b1.end());
    flat.insert(flat.end(), g.w2.begin(), g.w2.end());
    flat.push_back(g.b2);
    return flat;
}

namespace {

ordered_json scaler_to_json(const AffineScaler& scaler) {
    return ordered_json{{"offset", scaler.offset}, {"scale", scaler.scale}};
}

AffineScaler scaler_from_json(const ordered_json& j) {
    AffineScaler scaler;
    scaler.offset = j.at("offset").get<std::vector<double>>();
    scaler.scale = j.at("scale").get<std::vector<double>>();
    if (scaler.offset.empty() || scaler.offset.size() != scaler.scale.size()) {
        throw SchemaError("scaler offset/scale arrays are empty or mismatched");
    }
    for (const double s : scaler.scale) {
        if (!std::isfinite(s) || s == 0.0) {
            throw SchemaError("scaler scale entries must be finite and nonzero");
        }
    }
    return scaler;
}

void require_size(const std::vector<double>& v, std::size_t want, const char* name) {
    if (v.size() != want) {
        throw SchemaError(std::string(name) + " has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(want));
    }
}

}  // namespace

void save_model(const EstimatorModel& model, const std::filesystem::path& path) {
    ordered_json j;
    j["format_version"] = 1;
    j["kind"] = kind_name(model.kind);
    j["feature_scaler"] = scaler_to_json(model.feature_scaler);
    j["target_scaler"] = scaler_to_json(model.target_scaler);
    j["train_mse_history"] = model.train_mse_history;
    switch (model.kind) {
        case EstimatorKind::Rbf:
            j["config"] = {{"center_count", model.rbf_config.center_count},
                           {"ridge", model.rbf_config.ridge},
                           {"kmeans_max_iters", model.rbf_config.kmeans_max_iters},
                           {"seed", model.rbf_config.seed}};
            j["params"] = {{"dim", model.rbf.dim},
                           {"center_count", model.rbf.center_count},
                           {"centers", model.rbf.centers},
                           {"widths", model.rbf.widths},
                           {"weights", model.rbf.weights}};
            break;
        case EstimatorKind::Anfis:
            j["config"] = {{"mfs_per_input", model.anfis_config.mfs_per_input},
                           {"epochs", model.anfis_config.epochs},
                           {"learning_rate", model.anfis_config.learning_rate},
                           {"seed", model.anfis_config.seed}};
            j["params"] = {{"dim", model.anfis.dim},
                           {"mfs_per_input", model.anfis.mfs_per_input},
                           {"mf_centers", model.anfis.mf_centers},
                           {"mf_widths", model.anfis.mf_widths},
                           {"consequents", model.anfis.consequents}};
            break;
        case EstimatorKind::Mlp:
            j["config"] = {{"hidden_units", model.mlp_config.hidden_units},
                           {"epochs", model.mlp_config.epochs},
                           {"learning_rate", model.mlp_config.learning_rate},
                           {"batch_size", model.mlp_config.batch_size},
                           {"seed", model.mlp_config.seed}};
            j["params"] = {{"dim", model.mlp.dim},
                           {"hidden", model.mlp.hidden},
                           {"w1", model.mlp.w1},
                           {"b1", model.mlp.b1},
                           {"w2", model.mlp.w2},
                           {"b2", model.mlp.b2}};
            break;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

EstimatorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != 1) {
            throw SchemaError("unsupported format_version " + std::to_string(version));
        }
        const std::string kind = j.at("kind").get<std::string>();
        EstimatorModel model;
        model.feature_scaler = scaler_from_json(j.at("feature_scaler"));
        model.target_scaler = scaler_from_json(j.at("target_scaler"));
        if (model.target_scaler.dim() != 1) {
            throw SchemaError("target_scaler must be one-dimensional");
        }
        model.train_mse_history =
            j.at("train_mse_history").get<std::vector<double>>();
        const ordered_json& params = j.at("params");
        const ordered_json& config = j.at("config");
        if (kind == "RBF") {
            model.kind = EstimatorKind::Rbf;
            model.rbf_config.center_count = config.at("center_count").get<std::size_t>();
            model.rbf_config.ridge = config.at("ridge").get<double>();
            model.rbf_config.kmeans_max_iters =
                config.at("kmeans_max_iters").get<std::size_t>();
            model.rbf_config.seed = config.at("seed").get<std::uint64_t>();
            model.rbf.dim = params.at("dim").get<std::size_t>();
            model.rbf.center_count = params.at("center_count").get<std::size_t>();
            model.rbf.centers = params.at("centers").get<std::vector<double>>();
            model.rbf.widths = params.at("widths").get<std::vector<double>>();
            model.rbf.weights = params.at("weights").get<std::vector<double>>();
            require_size(model.rbf.centers, model.rbf.center_count * model.rbf.dim,
                         "centers");
            require_size(model.rbf.widths, model.rbf.center_count, "widths");
            require_size(model.rbf.weights, model.rbf.center_count + 1, "weights");
            for (const double w : model.rbf.widths) {
                if (!(w > 0.0)) throw SchemaError("rbf widths must be > 0");
            }
            if (model.feature_scaler.dim() != model.rbf.dim) {
                throw SchemaError("feature_scaler does not match rbf dim");
            }
        } else if (kind == "ANFIS") {
            model.kind = EstimatorKind::Anfis;
            model.anfis_config.mfs_per_input =
                config.at("mfs_per_input").get<std::size_t>();
            model.anfis_config.epochs = config.at("epochs").get<std::size_t>();
            model.anfis_config.learning_rate =
                config.at("learning_rate").get<double>();
            model.anfis_config.seed = config.at("seed").get<std::uint64_t>();
            model.anfis.dim = params.at("dim").get<std::size_t>();
            model.anfis.mfs_per_input = params.at("mfs_per_input").get<std::size_t>();
            model.anfis.mf_centers =
                params.at("mf_centers").get<std::vector<double>>();
            model.anfis.mf_widths = params.at("mf_widths").get<std::vector<double>>();
            model.anfis.consequents =
                params.at("consequents").get<std::vector<double>>();
            const std::size_t dm = model.anfis.dim * model.anfis.mfs_per_input;
            require_size(model.anfis.mf_centers, dm, "mf_centers");
            require_size(model.anfis.mf_widths, dm, "mf_widths");
            const std::size_t rules =
                kernels::anfis_rule_count(model.anfis.dim, model.anfis.mfs_per_input);
            require_size(model.anfis.consequents, rules * (model.anfis.dim + 1),
                         "consequents");
            for (const double w : model.anfis.mf_widths) {
                if (!(w > 0.0)) throw SchemaError("anfis mf widths must be > 0");
            }
            if (model.feature_scaler.dim() != model.anfis.dim) {
                throw SchemaError("feature_scaler does not match anfis dim");
            }
        } else if (kind == "MLP") {
            model.kind = EstimatorKind::Mlp;
            model.mlp_config.hidden_units =
                config.at("hidden_units").get<std::size_t>();
            model.mlp_config.epochs = config.at("epochs").get<std::size_t>();
            model.mlp_config.learning_rate = config.at("learning_rate").get<double>();
            model.mlp_config.batch_size = config.at("batch_size").get<std::size_t>();
            model.mlp_config.seed = config.at("seed").get<std::uint64_t>();
            model.mlp.dim = params.at("dim").get<std::size_t>();
            model.mlp.hidden = params.at("hidden").get<std::size_t>();
            model.mlp.w1 = params.at("w1").get<std::vector<double>>();
            model.mlp.b1 = params.at("b1").get<std::vector<double>>();
            model.mlp.w2 = params.at("w2").get<std::vector<double>>();
            model.mlp.b2 = params.at("b2").get<double>();
            require_size(model.mlp.w1, model.mlp.hidden * model.mlp.dim, "w1");
            require_size(model.mlp.b1, model.mlp.hidden, "b1");
            require_size(model.mlp.w2, model.mlp.hidden, "w2");
            if (model.feature_scaler.dim() != model.mlp.dim) {
                throw SchemaError("feature_scaler does not match mlp dim");
            }
        } else {
            throw SchemaError("unknown model kind '" + kind + "'");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

}  // namespace txlife::estimators
