#include "txlife/fusion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "txlife/errors.hpp"
#include "txlife/kernels.hpp"
#include "txlife/rng.hpp"

namespace txlife::fusion {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kNoiseFloor = 1e-18;

void check_finite_series(std::span<const double> values, const char* name) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidInputError(std::string(name) + " value at index " +
                                    std::to_string(i) + " is not finite");
        }
    }
}

void check_pair(std::span<const double> yhat, std::span<const double> ohat) {
    if (yhat.empty() || ohat.empty()) {
        throw EmptyInputError("fusion input series must be nonempty");
    }
    if (yhat.size() != ohat.size()) {
        throw ShapeError("stream lengths differ: " + std::to_string(yhat.size()) +
                         " vs " + std::to_string(ohat.size()));
    }
    check_finite_series(yhat, "yhat");
    check_finite_series(ohat, "ohat");
}

void check_triple(std::span<const double> yhat, std::span<const double> ohat,
                  std::span<const double> targets) {
    check_pair(yhat, ohat);
    if (targets.size() != yhat.size()) {
        throw ShapeError("target length " + std::to_string(targets.size()) +
                         " differs from stream length " + std::to_string(yhat.size()));
    }
    check_finite_series(targets, "target");
}

void check_track(const KalmanTrack& track) {
    if (!std::isfinite(track.x_hat)) {
        throw InvalidInputError("kalman state estimate is not finite");
    }
    if (!std::isfinite(track.p) || track.p <= 0.0) {
        throw InvalidInputError("kalman error covariance must be finite and > 0");
    }
}

double fuse_one(double c1, double c2, double yhat, double ohat) {
    // convex combination; clamp guards the 1-ulp overshoot FP can introduce
    const double fused = c1 * yhat + c2 * ohat;
    return std::clamp(fused, std::min(yhat, ohat), std::max(yhat, ohat));
}

}  // namespace

OwaWeights OwaWeights::from_c1(double c1) {
    OwaWeights weights{c1, 1.0 - c1};
    validate(weights);
    return weights;
}

void validate(const OwaWeights& weights) {
    if (!std::isfinite(weights.c1) || !std::isfinite(weights.c2)) {
        throw InvalidInputError("owa weights must be finite");
    }
    if (weights.c1 < 0.0 || weights.c1 > 1.0 || weights.c2 < 0.0 || weights.c2 > 1.0) {
        throw InvalidInputError("owa weights must lie in [0, 1]");
    }
    if (std::fabs(weights.c1 + weights.c2 - 1.0) > kWeightSumTol) {
        throw InvalidInputError("owa weights must sum to 1");
    }
}

double owa_fuse(const OwaWeights& weights, double yhat, double ohat) {
    validate(weights);
    if (!std::isfinite(yhat) || !std::isfinite(ohat)) {
        throw InvalidInputError("owa_fuse inputs must be finite");
    }
    return fuse_one(weights.c1, weights.c2, yhat, ohat);
}

std::vector<double> owa_fuse_series(const OwaWeights& weights,
                                    std::span<const double> yhat,
                                    std::span<const double> ohat) {
    validate(weights);
    check_pair(yhat, ohat);
    std::vector<double> fused(yhat.size());
    for (std::size_t s = 0; s < yhat.size(); ++s) {
        fused[s] = fuse_one(weights.c1, weights.c2, yhat[s], ohat[s]);
    }
    return fused;
}

double owa_objective(const OwaWeights& weights, std::span<const double> yhat,
                     std::span<const double> ohat, std::span<const double> targets) {
    validate(weights);
    check_triple(yhat, ohat, targets);
    const double c1 = weights.c1;
    double objective = 0.0;
    kernels::owa_objective_batch({&c1, 1}, yhat, ohat, targets, {&objective, 1},
                                 kernels::Backend::Serial);
    return objective;
}

void validate(const GaConfig& config) {
    if (config.population < 2) {
        throw ConfigError("ga population must be at least 2");
    }
    if (!std::isfinite(config.crossover_rate) || config.crossover_rate < 0.0 ||
        config.crossover_rate > 1.0) {
        throw ConfigError("ga crossover rate must lie in [0, 1]");
    }
    if (!std::isfinite(config.mutation_rate) || config.mutation_rate < 0.0 ||
        config.mutation_rate > 1.0) {
        throw ConfigError("ga mutation rate must lie in [0, 1]");
    }
    if (!std::isfinite(config.mutation_scale) || config.mutation_scale < 0.0) {
        throw ConfigError("ga mutation scale must be finite and >= 0");
    }
}

OwaWeights optimize_owa_weights(std::span<const double> yhat,
                                std::span<const double> ohat,
                                std::span<const double> targets,
                                const GaConfig& config, GaTrace* trace) {
    validate(config);
    check_triple(yhat, ohat, targets);

    const std::size_t pop_size = config.population;
    Rng rng(config.seed);

    // Corner genomes first so neither single stream can beat the result.
    std::vector<double> genomes(pop_size);
    genomes[0] = 1.0;
    genomes[1] = 0.0;
    for (std::size_t i = 2; i < pop_size; ++i) genomes[i] = rng.uniform();

    std::vector<double> fitness(pop_size);
    std::vector<double> next(pop_size);
    const kernels::Backend backend = kernels::default_backend();

    const auto evaluate_and_rank = [&]() {
        kernels::owa_objective_batch(genomes, yhat, ohat, targets, fitness, backend);
        std::size_t best = 0;
        for (std::size_t i = 1; i < pop_size; ++i) {
            if (fitness[i] < fitness[best]) best = i;
        }
        return best;
    };
    const auto tournament = [&]() {
        const std::size_t a = rng.uniform_index(pop_size);
        const std::size_t b = rng.uniform_index(pop_size);
        return fitness[b] < fitness[a] ? genomes[b] : genomes[a];
    };

    std::size_t best = evaluate_and_rank();
    if (trace) trace->best_objective.assign(1, fitness[best]);

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        const double prev_best = fitness[best];
        next[0] = genomes[best];  // elitism of 1
        for (std::size_t slot = 1; slot < pop_size; ++slot) {
            const double p1 = tournament();
            const double p2 = tournament();
            double child = p1;
            if (rng.uniform() < config.crossover_rate) {
                const double alpha = rng.uniform();
                child = alpha * p1 + (1.0 - alpha) * p2;
            }
            if (rng.uniform() < config.mutation_rate) {
                child += config.mutation_scale * rng.gaussian();
            }
            next[slot] = std::clamp(child, 0.0, 1.0);
        }
        genomes.swap(next);
        best = evaluate_and_rank();
        // elitism makes the best objective non-increasing across generations
        assert(fitness[best] <= prev_best);
        (void)prev_best;
        if (trace) trace->best_objective.push_back(fitness[best]);
    }

    return OwaWeights::from_c1(genomes[best]);
}

void validate(const KalmanConfig& config) {
    if (!std::isfinite(config.a) || !std::isfinite(config.b) ||
        !std::isfinite(config.x0)) {
        throw ConfigError("kalman a, b, x0 must be finite");
    }
    if (!std::isfinite(config.h) || config.h == 0.0) {
        throw ConfigError("kalman observation map h must be finite and nonzero");
    }
    if (!std::isfinite(config.q) || config.q < 0.0) {
        throw ConfigError("kalman process noise q must be finite and >= 0");
    }
    if (!std::isfinite(config.e_anfis) || config.e_anfis <= 0.0 ||
        !std::isfinite(config.e_rbf) || config.e_rbf <= 0.0) {
        throw ConfigError("kalman measurement noises must be finite and > 0");
    }
    if (!std::isfinite(config.p0) || config.p0 <= 0.0) {
        throw ConfigError("kalman initial covariance p0 must be finite and > 0");
    }
}

KalmanTrack kalman_predict(const KalmanTrack& track, const KalmanConfig& config,
                           double u) {
    validate(config);
    check_track(track);
    if (!std::isfinite(u)) {
        throw InvalidInputError("kalman control input must be finite");
    }
    KalmanTrack out;
    out.x_hat = config.a * track.x_hat + config.b * u;
    out.p = config.a * track.p * config.a + config.q;
    return out;
}

KalmanTrack kalman_update(const KalmanTrack& track, const KalmanConfig& config,
                          double z, double e) {
    validate(config);
    check_track(track);
    if (!std::isfinite(z)) {
        throw InvalidInputError("kalman measurement must be finite");
    }
    if (!std::isfinite(e) || e <= 0.0) {
        throw InvalidInputError("kalman measurement noise must be finite and > 0");
    }
    const double h = config.h;
    const double k = track.p * h / (h * track.p * h + e);
    KalmanTrack out;
    out.x_hat = track.x_hat + k * (z - h * track.x_hat);
    out.p = (1.0 - k * h) * track.p;
    return out;
}

namespace {

/// Shared recursion; null hours means unit spacing throughout.
std::vector<double> fuse_impl(std::span<const double> yhat,
                              std::span<const double> ohat,
                              const std::int64_t* hours, const KalmanConfig& config) {
    KalmanTrack track{config.x0, config.p0};
    check_track(track);
    KalmanConfig step = config;
    std::vector<double> fused(yhat.size());
    for (std::size_t s = 0; s < yhat.size(); ++s) {
        const double dt = (hours && s > 0)
                              ? static_cast<double>(hours[s] - hours[s - 1])
                              : 1.0;
        step.q = config.q * dt;
        track = kalman_predict(track, step, 0.0);
        track = kalman_update(track, step, yhat[s], config.e_anfis);
        track = kalman_update(track, step, ohat[s], config.e_rbf);
        fused[s] = track.x_hat;
    }
    return fused;
}

void check_hours(std::span<const std::int64_t> hours, std::size_t expected) {
    if (hours.size() != expected) {
        throw ShapeError("hour stamps length " + std::to_string(hours.size()) +
                         " differs from stream length " + std::to_string(expected));
    }
    for (std::size_t s = 1; s < hours.size(); ++s) {
        if (hours[s] <= hours[s - 1]) {
            throw InvalidInputError("hour stamps must be strictly increasing at index " +
                                    std::to_string(s));
        }
    }
}

}  // namespace

std::vector<double> sequential_kalman_fuse(std::span<const double> yhat,
                                           std::span<const double> ohat,
                                           const KalmanConfig& config) {
    validate(config);
    check_pair(yhat, ohat);
    return fuse_impl(yhat, ohat, nullptr, config);
}

std::vector<double> sequential_kalman_fuse(std::span<const double> yhat,
                                           std::span<const double> ohat,
                                           std::span<const std::int64_t> hours,
                                           const KalmanConfig& config) {
    validate(config);
    check_pair(yhat, ohat);
    check_hours(hours, yhat.size());
    return fuse_impl(yhat, ohat, hours.data(), config);
}

double optimize_process_noise(std::span<const double> yhat,
                              std::span<const double> ohat,
                              std::span<const std::int64_t> hours,
                              std::span<const double> targets,
                              const KalmanConfig& config) {
    validate(config);
    check_triple(yhat, ohat, targets);
    check_hours(hours, yhat.size());

    KalmanConfig candidate = config;
    const auto mse_at = [&](double q) {
        candidate.q = q;
        const std::vector<double> fused = fuse_impl(yhat, ohat, hours.data(), candidate);
        double acc = 0.0;
        for (std::size_t s = 0; s < fused.size(); ++s) {
            const double e = fused[s] - targets[s];
            acc += e * e;
        }
        return acc / static_cast<double>(fused.size());
    };

    const double anchor = std::min(config.e_anfis, config.e_rbf);
    double best_q = anchor;
    double best_mse = mse_at(anchor);
    // coarse pass: powers of two spanning ~1e-3 to ~1e6 times the anchor
    for (int i = -10; i <= 20; ++i) {
        const double q = std::ldexp(anchor, i);
        const double m = mse_at(q);
        if (m < best_mse) {
            best_mse = m;
            best_q = q;
        }
    }
    // fine pass: eighth-octave steps around the coarse winner
    const double coarse = best_q;
    for (int i = -8; i <= 8; ++i) {
        const double q = coarse * std::pow(2.0, static_cast<double>(i) / 8.0);
        const double m = mse_at(q);
        if (m < best_mse) {
            best_mse = m;
            best_q = q;
        }
    }
    return best_q;
}

double estimate_measurement_noise(std::span<const double> preds,
                                  std::span<const double> targets) {
    if (preds.empty() || targets.empty()) {
        throw EmptyInputError("noise estimation needs a nonempty series");
    }
    if (preds.size() != targets.size()) {
        throw ShapeError("prediction length " + std::to_string(preds.size()) +
                         " differs from target length " + std::to_string(targets.size()));
    }
    check_finite_series(preds, "prediction");
    check_finite_series(targets, "target");

    const double n = static_cast<double>(preds.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) mean += preds[i] - targets[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - targets[i] - mean;
        var += d * d;
    }
    var /= n;
    return std::max(var, kNoiseFloor);
}

double estimate_measurement_noise(const estimators::EstimatorModel& model,
                                  std::span<const double> rows,
                                  std::span<const double> targets) {
    const std::vector<double> preds = estimators::predict_many(model, rows);
    return estimate_measurement_noise(preds, targets);
}

}  // namespace txlife::fusion
