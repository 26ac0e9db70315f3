#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "txlife/errors.hpp"
#include "txlife/estimators.hpp"
#include "txlife/fusion.hpp"
#include "txlife/metrics.hpp"
#include "txlife/rng.hpp"

using namespace txlife;
using namespace txlife::fusion;

namespace {

struct Streams {
    std::vector<double> yhat;
    std::vector<double> ohat;
    std::vector<double> targets;
};

Streams random_streams(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Streams s;
    for (std::size_t i = 0; i < n; ++i) {
        s.yhat.push_back(rng.uniform(-2.0, 2.0));
        s.ohat.push_back(rng.uniform(-2.0, 2.0));
        s.targets.push_back(rng.uniform(-2.0, 2.0));
    }
    return s;
}

}  // namespace

TEST_CASE("owa weights validate") {
    CHECK_NOTHROW(validate(OwaWeights{0.25, 0.75}));
    CHECK_NOTHROW(OwaWeights::from_c1(0.0));
    CHECK_NOTHROW(OwaWeights::from_c1(1.0));
    const OwaWeights w = OwaWeights::from_c1(0.3);
    CHECK(w.c1 == 0.3);
    CHECK(w.c1 + w.c2 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(OwaWeights::from_c1(1.5), InvalidInputError);
    CHECK_THROWS_AS(OwaWeights::from_c1(-0.1), InvalidInputError);
    CHECK_THROWS_AS(OwaWeights::from_c1(std::nan("")), InvalidInputError);
    CHECK_THROWS_AS(validate(OwaWeights{0.6, 0.6}), InvalidInputError);
    CHECK_THROWS_AS(validate(OwaWeights{0.5, 0.5 + 1e-9}), InvalidInputError);
}

TEST_CASE("owa_fuse examples") {
    CHECK(owa_fuse(OwaWeights::from_c1(1.0), 3.25, -100.0) == 3.25);
    CHECK(owa_fuse(OwaWeights::from_c1(0.0), 3.25, -100.0) == -100.0);
    CHECK(owa_fuse(OwaWeights{0.9, 0.1}, 10.0, 20.0) == doctest::Approx(11.0).epsilon(1e-15));
    CHECK(owa_fuse(OwaWeights::from_c1(0.5), 7.125, 7.125) == 7.125);

    CHECK_THROWS_AS(owa_fuse(OwaWeights::from_c1(0.5), std::nan(""), 1.0),
                    InvalidInputError);
    CHECK_THROWS_AS(owa_fuse(OwaWeights{2.0, -1.0}, 1.0, 1.0), InvalidInputError);
}

TEST_CASE("owa_fuse stays between its inputs") {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const double c1 = rng.uniform();
        const double a = rng.uniform(-1e6, 1e6);
        const double b = rng.uniform(-1e6, 1e6);
        const double f = owa_fuse(OwaWeights::from_c1(c1), a, b);
        CHECK(f >= std::min(a, b));
        CHECK(f <= std::max(a, b));
    }
}

TEST_CASE("owa_fuse_series matches the scalar op") {
    const Streams s = random_streams(64, 21);
    const OwaWeights w = OwaWeights::from_c1(0.37);
    const std::vector<double> fused = owa_fuse_series(w, s.yhat, s.ohat);
    REQUIRE(fused.size() == s.yhat.size());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        CHECK(fused[i] == owa_fuse(w, s.yhat[i], s.ohat[i]));
    }
    CHECK_THROWS_AS(owa_fuse_series(w, s.yhat, std::vector<double>(3, 0.0)), ShapeError);
    CHECK_THROWS_AS(owa_fuse_series(w, {}, {}), EmptyInputError);
}

TEST_CASE("owa_objective hand values") {
    const std::vector<double> yhat{1.0, 2.0};
    const std::vector<double> ohat{3.0, 4.0};
    const std::vector<double> targets{2.0, 3.0};
    CHECK(owa_objective(OwaWeights::from_c1(0.5), yhat, ohat, targets) == 0.0);

    // fused stream equal to the targets drives the objective to zero
    const OwaWeights w = OwaWeights::from_c1(0.25);
    const std::vector<double> fused = owa_fuse_series(w, yhat, ohat);
    CHECK(owa_objective(w, yhat, ohat, fused) == 0.0);

    CHECK_THROWS_AS(owa_objective(w, yhat, ohat, std::vector<double>(3, 0.0)),
                    ShapeError);
    CHECK_THROWS_AS(owa_objective(w, {}, {}, {}), EmptyInputError);
}

TEST_CASE("owa_objective at c1=1 equals mse bitwise") {
    const Streams s = random_streams(257, 33);
    const double obj = owa_objective(OwaWeights::from_c1(1.0), s.yhat, s.ohat, s.targets);
    CHECK(obj == metrics::mse(s.yhat, s.targets));
    const double obj0 = owa_objective(OwaWeights::from_c1(0.0), s.yhat, s.ohat, s.targets);
    CHECK(obj0 == doctest::Approx(metrics::mse(s.ohat, s.targets)).epsilon(1e-15));
}

TEST_CASE("ga config validation") {
    CHECK_NOTHROW(validate(GaConfig{}));
    GaConfig bad;
    bad.population = 1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = GaConfig{};
    bad.crossover_rate = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = GaConfig{};
    bad.mutation_rate = -0.1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = GaConfig{};
    bad.mutation_scale = -1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("ga recovers the perfect corner") {
    const Streams s = random_streams(128, 41);
    GaConfig cfg;
    cfg.seed = 7;
    // targets identical to the first stream: optimum sits at c1 = 1
    const OwaWeights w = optimize_owa_weights(s.yhat, s.ohat, s.yhat, cfg);
    CHECK(w.c1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(owa_objective(w, s.yhat, s.ohat, s.yhat) <= 1e-15);
}

TEST_CASE("ga recovers an interior optimum and matches a grid oracle") {
    Rng rng(55);
    std::vector<double> yhat;
    std::vector<double> ohat;
    std::vector<double> targets;
    for (int i = 0; i < 200; ++i) {
        const double y = rng.uniform(-1.0, 1.0);
        const double o = y + rng.uniform(0.5, 1.5);  // keep the streams apart
        yhat.push_back(y);
        ohat.push_back(o);
        targets.push_back(0.7 * y + 0.3 * o);
    }
    GaConfig cfg;
    cfg.seed = 3;
    GaTrace trace;
    const OwaWeights w = optimize_owa_weights(yhat, ohat, targets, cfg, &trace);
    CHECK(w.c1 >= 0.68);
    CHECK(w.c1 <= 0.72);

    const double got = owa_objective(w, yhat, ohat, targets);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 10000; ++i) {
        const double c1 = static_cast<double>(i) / 10000.0;
        grid_best = std::min(
            grid_best, owa_objective(OwaWeights::from_c1(c1), yhat, ohat, targets));
    }
    CHECK(std::fabs(got - grid_best) <= 1e-12);
}

TEST_CASE("ga corner dominance and monotone trace") {
    const Streams s = random_streams(100, 77);
    GaConfig cfg;
    cfg.seed = 13;
    GaTrace trace;
    const OwaWeights w = optimize_owa_weights(s.yhat, s.ohat, s.targets, cfg, &trace);

    const double best = owa_objective(w, s.yhat, s.ohat, s.targets);
    const double corner1 = owa_objective(OwaWeights::from_c1(1.0), s.yhat, s.ohat, s.targets);
    const double corner0 = owa_objective(OwaWeights::from_c1(0.0), s.yhat, s.ohat, s.targets);
    CHECK(best <= std::min(corner1, corner0) + 1e-15);

    REQUIRE(trace.best_objective.size() == cfg.generations + 1);
    for (std::size_t g = 1; g < trace.best_objective.size(); ++g) {
        CHECK(trace.best_objective[g] <= trace.best_objective[g - 1]);
    }
    CHECK(trace.best_objective.back() == doctest::Approx(best).epsilon(1e-15));
}

TEST_CASE("ga determinism") {
    const Streams s = random_streams(90, 91);
    GaConfig cfg;
    cfg.seed = 1234;
    const OwaWeights a = optimize_owa_weights(s.yhat, s.ohat, s.targets, cfg);
    const OwaWeights b = optimize_owa_weights(s.yhat, s.ohat, s.targets, cfg);
    CHECK(a.c1 == b.c1);
    CHECK(a.c2 == b.c2);
}

TEST_CASE("kalman config validation") {
    CHECK_NOTHROW(validate(KalmanConfig{}));
    KalmanConfig bad;
    bad.h = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = KalmanConfig{};
    bad.q = -1e-9;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = KalmanConfig{};
    bad.e_anfis = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = KalmanConfig{};
    bad.e_rbf = -2.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = KalmanConfig{};
    bad.p0 = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("kalman_predict examples") {
    KalmanConfig cfg;  // a=1, b=0
    cfg.q = 0.0;
    KalmanTrack t{2.5, 1.0};
    KalmanTrack out = kalman_predict(t, cfg, 0.0);
    CHECK(out.x_hat == 2.5);
    CHECK(out.p == 1.0);

    cfg.q = 0.5;
    out = kalman_predict(t, cfg, 0.0);
    CHECK(out.x_hat == 2.5);
    CHECK(out.p == 1.5);

    cfg = KalmanConfig{};
    cfg.a = 2.0;
    cfg.b = 1.0;
    cfg.q = 0.0;
    out = kalman_predict(KalmanTrack{1.0, 1.0}, cfg, 3.0);
    CHECK(out.x_hat == 5.0);
    CHECK(out.p == 4.0);

    CHECK_THROWS_AS(kalman_predict(KalmanTrack{1.0, 0.0}, cfg, 0.0), InvalidInputError);
    CHECK_THROWS_AS(kalman_predict(t, cfg, std::nan("")), InvalidInputError);
}

TEST_CASE("kalman_update examples") {
    const KalmanConfig cfg;  // h = 1
    KalmanTrack out = kalman_update(KalmanTrack{0.0, 1.0}, cfg, 2.0, 1.0);
    CHECK(out.x_hat == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.p == doctest::Approx(0.5).epsilon(1e-15));

    // near-exact measurement: gain approaches 1 and the state snaps to z
    out = kalman_update(KalmanTrack{10.0, 1.0}, cfg, -4.0, 1e-15);
    CHECK(out.x_hat == doctest::Approx(-4.0).epsilon(1e-9));

    // zero innovation leaves the state alone but still shrinks p
    out = kalman_update(KalmanTrack{3.0, 2.0}, cfg, 3.0, 1.0);
    CHECK(out.x_hat == 3.0);
    CHECK(out.p < 2.0);
    CHECK(out.p > 0.0);

    CHECK_THROWS_AS(kalman_update(KalmanTrack{0.0, 1.0}, cfg, 1.0, 0.0),
                    InvalidInputError);
    CHECK_THROWS_AS(kalman_update(KalmanTrack{0.0, 1.0}, cfg, 1.0, -1.0),
                    InvalidInputError);
    CHECK_THROWS_AS(kalman_update(KalmanTrack{0.0, 1.0}, cfg, std::nan(""), 1.0),
                    InvalidInputError);
}

TEST_CASE("kalman covariance stays positive and shrinks on update") {
    KalmanConfig cfg;
    cfg.q = 0.01;
    Rng rng(17);
    KalmanTrack t{0.0, 1.0};
    for (int i = 0; i < 500; ++i) {
        t = kalman_predict(t, cfg, 0.0);
        const double before = t.p;
        t = kalman_update(t, cfg, rng.uniform(-1.0, 1.0), 0.5);
        CHECK(t.p > 0.0);
        CHECK(t.p < before);
    }
}

TEST_CASE("sequential fusion matches a hand-stepped oracle") {
    KalmanConfig cfg;
    cfg.q = 0.01;
    cfg.e_anfis = 1.0;
    cfg.e_rbf = 2.0;
    cfg.x0 = 0.0;
    cfg.p0 = 1.0;
    const std::vector<double> yhat{1.0, 2.0, 0.5};
    const std::vector<double> ohat{1.5, 1.0, 0.0};

    const std::vector<double> want_x{0.7027833001988071570577, 1.070715203215556607194,
                                     0.8612722020441599501819};
    const std::vector<double> want_p{0.4015904572564612326044, 0.2544788548881745939069,
                                     0.1893573372910560692226};

    const std::vector<double> fused = sequential_kalman_fuse(yhat, ohat, cfg);
    REQUIRE(fused.size() == 3);
    for (std::size_t s = 0; s < 3; ++s) {
        CHECK(fused[s] == doctest::Approx(want_x[s]).epsilon(1e-12));
    }

    // step the public ops by hand and confirm the covariance trajectory too
    KalmanTrack t{cfg.x0, cfg.p0};
    for (std::size_t s = 0; s < 3; ++s) {
        t = kalman_predict(t, cfg, 0.0);
        t = kalman_update(t, cfg, yhat[s], cfg.e_anfis);
        t = kalman_update(t, cfg, ohat[s], cfg.e_rbf);
        CHECK(t.x_hat == fused[s]);
        CHECK(t.p == doctest::Approx(want_p[s]).epsilon(1e-12));
        CHECK(t.p > 0.0);
    }
}

TEST_CASE("swapping the two update steps preserves the fused value") {
    KalmanConfig cfg;
    cfg.q = 0.02;
    cfg.e_anfis = 0.7;
    cfg.e_rbf = 1.9;
    cfg.x0 = 0.3;
    cfg.p0 = 0.8;
    const Streams s = random_streams(300, 101);

    const std::vector<double> fused = sequential_kalman_fuse(s.yhat, s.ohat, cfg);

    KalmanTrack t{cfg.x0, cfg.p0};
    for (std::size_t i = 0; i < s.yhat.size(); ++i) {
        t = kalman_predict(t, cfg, 0.0);
        t = kalman_update(t, cfg, s.ohat[i], cfg.e_rbf);  // RBF stream first
        t = kalman_update(t, cfg, s.yhat[i], cfg.e_anfis);
        CHECK(t.x_hat == doctest::Approx(fused[i]).epsilon(1e-12));
    }
}

TEST_CASE("constant agreeing streams pass through unchanged") {
    KalmanConfig cfg;
    cfg.q = 0.05;
    cfg.x0 = 0.25;
    cfg.p0 = 3.0;
    const std::vector<double> stream(40, 0.25);
    const std::vector<double> fused = sequential_kalman_fuse(stream, stream, cfg);
    for (const double v : fused) CHECK(v == 0.25);
}

TEST_CASE("near-noiseless stream dominates the fusion") {
    Rng rng(7);
    std::vector<double> yhat;
    std::vector<double> ohat;
    for (int i = 0; i < 100; ++i) {
        yhat.push_back(rng.uniform(1.0, 2.0));
        ohat.push_back(rng.uniform(1.0, 2.0));
    }
    KalmanConfig cfg;
    cfg.q = 0.01;
    cfg.e_anfis = 1e-15;
    cfg.e_rbf = 1.0;
    cfg.x0 = yhat.front();
    cfg.p0 = 1.0;
    const std::vector<double> fused = sequential_kalman_fuse(yhat, ohat, cfg);
    for (std::size_t i = 0; i < fused.size(); ++i) {
        CHECK(std::fabs(fused[i] - yhat[i]) / std::fabs(yhat[i]) < 1e-6);
    }
}

TEST_CASE("fused values stay inside the prior/measurement span") {
    KalmanConfig cfg;
    cfg.q = 0.03;
    cfg.e_anfis = 0.4;
    cfg.e_rbf = 1.1;
    cfg.x0 = 0.0;
    cfg.p0 = 1.0;
    const Streams s = random_streams(400, 131);

    KalmanTrack t{cfg.x0, cfg.p0};
    const std::vector<double> fused = sequential_kalman_fuse(s.yhat, s.ohat, cfg);
    for (std::size_t i = 0; i < s.yhat.size(); ++i) {
        const double prior = t.x_hat;
        const double lo = std::min({prior, s.yhat[i], s.ohat[i]});
        const double hi = std::max({prior, s.yhat[i], s.ohat[i]});
        CHECK(fused[i] >= lo - 1e-12);
        CHECK(fused[i] <= hi + 1e-12);
        t = kalman_predict(t, cfg, 0.0);
        t = kalman_update(t, cfg, s.yhat[i], cfg.e_anfis);
        t = kalman_update(t, cfg, s.ohat[i], cfg.e_rbf);
    }
}

TEST_CASE("gap-aware fusion equals the plain op on unit spacing") {
    KalmanConfig cfg;
    cfg.q = 0.04;
    cfg.e_anfis = 0.6;
    cfg.e_rbf = 1.2;
    cfg.x0 = 0.1;
    cfg.p0 = 0.9;
    const Streams s = random_streams(200, 151);
    std::vector<std::int64_t> hours(s.yhat.size());
    for (std::size_t i = 0; i < hours.size(); ++i) {
        hours[i] = 1000 + static_cast<std::int64_t>(i);
    }
    const std::vector<double> plain = sequential_kalman_fuse(s.yhat, s.ohat, cfg);
    const std::vector<double> stamped =
        sequential_kalman_fuse(s.yhat, s.ohat, hours, cfg);
    REQUIRE(plain.size() == stamped.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        CHECK(plain[i] == stamped[i]);
    }
}

TEST_CASE("gap-aware fusion matches manually scaled steps") {
    KalmanConfig cfg;
    cfg.q = 0.03;
    cfg.e_anfis = 0.5;
    cfg.e_rbf = 2.0;
    cfg.x0 = -0.2;
    cfg.p0 = 1.4;
    const Streams s = random_streams(64, 163);
    std::vector<std::int64_t> hours;
    std::int64_t h = 0;
    Rng rng(9);
    for (std::size_t i = 0; i < s.yhat.size(); ++i) {
        h += 1 + static_cast<std::int64_t>(rng.uniform_index(6));
        hours.push_back(h);
    }
    const std::vector<double> fused = sequential_kalman_fuse(s.yhat, s.ohat, hours, cfg);

    KalmanTrack t{cfg.x0, cfg.p0};
    KalmanConfig step = cfg;
    for (std::size_t i = 0; i < s.yhat.size(); ++i) {
        const double dt = i == 0 ? 1.0 : static_cast<double>(hours[i] - hours[i - 1]);
        step.q = cfg.q * dt;
        t = kalman_predict(t, step, 0.0);
        t = kalman_update(t, step, s.yhat[i], cfg.e_anfis);
        t = kalman_update(t, step, s.ohat[i], cfg.e_rbf);
        CHECK(t.x_hat == fused[i]);
    }
}

TEST_CASE("a longer gap trusts new measurements more") {
    KalmanConfig cfg;
    cfg.q = 0.05;
    cfg.e_anfis = 1.0;
    cfg.e_rbf = 1.0;
    cfg.x0 = 0.0;
    cfg.p0 = 0.2;
    const std::vector<double> stream{0.0, 1.0};  // jump after the gap
    const std::vector<std::int64_t> tight{0, 1};
    const std::vector<std::int64_t> wide{0, 48};
    const double near = sequential_kalman_fuse(stream, stream, tight, cfg)[1];
    const double far = sequential_kalman_fuse(stream, stream, wide, cfg)[1];
    CHECK(std::fabs(far - 1.0) < std::fabs(near - 1.0));
}

TEST_CASE("gap-aware fusion validates its hour stamps") {
    const KalmanConfig cfg;
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<std::int64_t> short_hours{0, 1};
    CHECK_THROWS_AS(sequential_kalman_fuse(a, a, short_hours, cfg), ShapeError);
    const std::vector<std::int64_t> repeat{0, 1, 1};
    CHECK_THROWS_AS(sequential_kalman_fuse(a, a, repeat, cfg), InvalidInputError);
    const std::vector<std::int64_t> backwards{0, 2, 1};
    CHECK_THROWS_AS(sequential_kalman_fuse(a, a, backwards, cfg), InvalidInputError);
}

TEST_CASE("process noise search lands near a known random walk scale") {
    Rng rng(2718);
    const double step_sd = 0.05;
    const double noise_a = 0.2;
    const double noise_b = 0.3;
    std::vector<double> target, yhat, ohat;
    std::vector<std::int64_t> hours;
    double x = 0.0;
    std::int64_t h = 0;
    for (int i = 0; i < 3000; ++i) {
        const std::int64_t dt = 1 + static_cast<std::int64_t>(rng.uniform_index(3));
        h += dt;
        x += step_sd * std::sqrt(static_cast<double>(dt)) * rng.gaussian();
        hours.push_back(h);
        target.push_back(x);
        yhat.push_back(x + noise_a * rng.gaussian());
        ohat.push_back(x + noise_b * rng.gaussian());
    }
    KalmanConfig cfg;
    cfg.e_anfis = noise_a * noise_a;
    cfg.e_rbf = noise_b * noise_b;
    cfg.x0 = yhat.front();
    cfg.p0 = cfg.e_anfis;
    const double q = optimize_process_noise(yhat, ohat, hours, target, cfg);
    CHECK(q > 0.0);
    // true per-hour process variance is step_sd^2 = 2.5e-3
    CHECK(q >= step_sd * step_sd / 8.0);
    CHECK(q <= step_sd * step_sd * 8.0);

    // the returned q is the argmin over its own evaluation grid
    const auto mse_at = [&](double candidate) {
        KalmanConfig kc = cfg;
        kc.q = candidate;
        return metrics::mse(sequential_kalman_fuse(yhat, ohat, hours, kc), target);
    };
    const double best = mse_at(q);
    CHECK(best <= mse_at(std::min(cfg.e_anfis, cfg.e_rbf)));
    CHECK(best <= mse_at(q * 4.0));
    CHECK(best <= mse_at(q / 4.0));

    CHECK(q == optimize_process_noise(yhat, ohat, hours, target, cfg));
}

TEST_CASE("sequential fusion input validation") {
    const KalmanConfig cfg;
    CHECK_THROWS_AS(sequential_kalman_fuse({}, {}, cfg), EmptyInputError);
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    CHECK_THROWS_AS(sequential_kalman_fuse(a, b, cfg), ShapeError);
    const std::vector<double> c{1.0, std::nan("")};
    CHECK_THROWS_AS(sequential_kalman_fuse(a, c, cfg), InvalidInputError);
}

TEST_CASE("measurement noise estimation") {
    const std::vector<double> preds{1.0, 2.0, 3.0};
    CHECK(estimate_measurement_noise(preds, preds) == 1e-18);

    const std::vector<double> targets{2.0, 1.0};
    const std::vector<double> shifted{1.0, 2.0};
    // residuals (-1, 1): zero mean, population variance 1
    CHECK(estimate_measurement_noise(shifted, targets) == 1.0);

    // constant offset has zero variance: the floor engages
    const std::vector<double> offset{2.0, 3.0, 4.0};
    CHECK(estimate_measurement_noise(offset, preds) == 1e-18);

    CHECK_THROWS_AS(estimate_measurement_noise({}, {}), EmptyInputError);
    CHECK_THROWS_AS(estimate_measurement_noise(preds, targets), ShapeError);
}

TEST_CASE("measurement noise from a trained model") {
    Rng rng(19);
    std::vector<double> rows;
    std::vector<double> targets;
    for (int i = 0; i < 40; ++i) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        rows.push_back(x);
        rows.push_back(y);
        targets.push_back(0.5 * x - 0.25 * y + 0.1);
    }
    estimators::RbfConfig cfg;
    cfg.center_count = 8;
    cfg.seed = 5;
    const estimators::EstimatorModel model = estimators::train_rbf(rows, 2, targets, cfg);

    const double e = estimate_measurement_noise(model, rows, targets);
    const std::vector<double> preds = estimators::predict_many(model, rows);
    CHECK(e == estimate_measurement_noise(preds, targets));
    CHECK(e >= 1e-18);
}
