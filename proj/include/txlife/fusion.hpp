#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "txlife/estimators.hpp"

namespace txlife::fusion {

/// Convex weights over the (ANFIS, RBF) prediction streams: both in [0, 1],
/// summing to 1 within 1e-12. Construct through from_c1 or validate after
/// aggregate initialization.
struct OwaWeights {
    double c1 = 0.5;  ///< ANFIS stream weight
    double c2 = 0.5;  ///< RBF stream weight

    static OwaWeights from_c1(double c1);
};

void validate(const OwaWeights& weights);

/// c1*yhat + c2*ohat; always inside [min(yhat, ohat), max(yhat, ohat)].
double owa_fuse(const OwaWeights& weights, double yhat, double ohat);

std::vector<double> owa_fuse_series(const OwaWeights& weights,
                                    std::span<const double> yhat,
                                    std::span<const double> ohat);

/// Mean squared error of the fused stream against the targets.
double owa_objective(const OwaWeights& weights, std::span<const double> yhat,
                     std::span<const double> ohat, std::span<const double> targets);

/// Real-valued GA over the scalar genome c1 (c2 = 1 - c1 by construction).
struct GaConfig {
    std::size_t population = 40;  ///< >= 2
    std::size_t generations = 60;
    double crossover_rate = 0.9;  ///< in [0, 1]
    double mutation_rate = 0.1;   ///< in [0, 1]
    double mutation_scale = 0.05;
    std::uint64_t seed = 0;
};

void validate(const GaConfig& config);

/// Best objective value after each generation; non-increasing (elitism).
struct GaTrace {
    std::vector<double> best_objective;
};

/// Tournament-of-2 selection, blend crossover, clipped Gaussian mutation,
/// elitism of 1. Both corner genomes (c1 = 1 and c1 = 0) are injected into
/// the initial population, so the returned objective never exceeds the
/// better single stream by more than 1e-15. Deterministic per seed: random
/// draws happen in a fixed order regardless of how fitness is evaluated.
OwaWeights optimize_owa_weights(std::span<const double> yhat,
                                std::span<const double> ohat,
                                std::span<const double> targets,
                                const GaConfig& config, GaTrace* trace = nullptr);

/// Scalar filter coefficients and noise levels. The default transition /
/// observation pair (a = h = 1, b = 0) is the configuration the fusion stage
/// runs with; q and the two measurement noises are data-driven.
struct KalmanConfig {
    double a = 1.0;        ///< state transition
    double b = 0.0;        ///< control gain
    double h = 1.0;        ///< observation map, nonzero
    double q = 0.0;        ///< process noise, >= 0
    double e_anfis = 1.0;  ///< ANFIS-stream measurement noise, > 0
    double e_rbf = 1.0;    ///< RBF-stream measurement noise, > 0
    double x0 = 0.0;       ///< initial state
    double p0 = 1.0;       ///< initial covariance, > 0
};

void validate(const KalmanConfig& config);

/// State estimate and error covariance; p stays > 0 through any sequence of
/// predicts and updates.
struct KalmanTrack {
    double x_hat = 0.0;
    double p = 1.0;
};

/// Time step: x <- a*x + b*u, p <- a*p*a + q.
KalmanTrack kalman_predict(const KalmanTrack& track, const KalmanConfig& config,
                           double u);

/// Measurement step with noise e: k = p*h / (h*p*h + e), x <- x + k*(z - h*x),
/// p <- (1 - k*h)*p. Strictly shrinks p.
KalmanTrack kalman_update(const KalmanTrack& track, const KalmanConfig& config,
                          double z, double e);

/// Per sample: one predict (u = 0), an update with the ANFIS value under
/// e_anfis, an update with the RBF value under e_rbf; emits the state after
/// both updates. Sequential by nature; pure per call.
std::vector<double> sequential_kalman_fuse(std::span<const double> yhat,
                                           std::span<const double> ohat,
                                           const KalmanConfig& config);

/// Gap-aware variant for series sampled at irregular hours: each predict
/// accumulates q over the elapsed time, p <- a*p*a + q*(hours[s]-hours[s-1]).
/// Equally spaced stamps reproduce the plain overload exactly. hours must be
/// strictly increasing and aligned with the series.
std::vector<double> sequential_kalman_fuse(std::span<const double> yhat,
                                           std::span<const double> ohat,
                                           std::span<const std::int64_t> hours,
                                           const KalmanConfig& config);

/// Deterministic two-stage log-grid search for the per-hour process noise:
/// minimizes the gap-aware fused MSE against the targets, scanning wide
/// around min(e_anfis, e_rbf) and refining near the coarse winner. config
/// supplies a, b, h, the noises and the start state; its q is ignored.
double optimize_process_noise(std::span<const double> yhat,
                              std::span<const double> ohat,
                              std::span<const std::int64_t> hours,
                              std::span<const double> targets,
                              const KalmanConfig& config);

/// Population variance of the prediction residuals about their mean, floored
/// at 1e-18. Used as a constant per-stream measurement noise.
double estimate_measurement_noise(std::span<const double> preds,
                                  std::span<const double> targets);

/// Convenience overload: residuals of a trained model over the given rows.
double estimate_measurement_noise(const estimators::EstimatorModel& model,
                                  std::span<const double> rows,
                                  std::span<const double> targets);

}  // namespace txlife::fusion
