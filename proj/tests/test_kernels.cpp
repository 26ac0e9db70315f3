#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "txlife/kernels.hpp"
#include "txlife/rng.hpp"

using namespace txlife;
using namespace txlife::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    return a.empty() ||
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("backend selection") {
    const Backend original = default_backend();
    set_default_backend(Backend::Serial);
    CHECK(default_backend() == Backend::Serial);
    set_default_backend(Backend::OpenMp);
    CHECK(default_backend() == Backend::OpenMp);
    set_default_backend(original);
    CHECK(max_threads() >= 1);
    if (!openmp_available()) CHECK(max_threads() == 1);
}

TEST_CASE("gaussian design: backends agree bitwise, bias column is one") {
    Rng rng(1001);
    for (std::size_t n : {1u, 7u, 64u}) {
        for (std::size_t dim : {1u, 2u, 5u}) {
            for (std::size_t k : {1u, 3u, 17u}) {
                const auto rows = random_vec(rng, n * dim, -2.0, 2.0);
                const auto centers = random_vec(rng, k * dim, -2.0, 2.0);
                const auto widths = random_vec(rng, k, 0.1, 1.5);
                std::vector<double> a(n * (k + 1)), b(n * (k + 1));
                gaussian_design(rows, dim, centers, widths, a, Backend::Serial);
                gaussian_design(rows, dim, centers, widths, b, Backend::OpenMp);
                CHECK(bitwise_equal(a, b));
                for (std::size_t i = 0; i < n; ++i) {
                    CHECK(a[i * (k + 1) + k] == 1.0);
                    for (std::size_t j = 0; j < k; ++j) {
                        const double v = a[i * (k + 1) + j];
                        CHECK(v > 0.0);
                        CHECK(v <= 1.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("gaussian design: exact value for a hand case") {
    // Single row at distance 1 from a single center of width 1:
    // value = exp(-1/2).
    const std::vector<double> rows{1.0};
    const std::vector<double> centers{0.0};
    const std::vector<double> widths{1.0};
    std::vector<double> out(2);
    gaussian_design(rows, 1, centers, widths, out, Backend::Serial);
    CHECK(out[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(out[1] == 1.0);
}

TEST_CASE("nearest center: backends agree, ties pick the lowest index") {
    Rng rng(1002);
    const std::size_t n = 40, dim = 3, k = 6;
    const auto rows = random_vec(rng, n * dim, -1.0, 1.0);
    const auto centers = random_vec(rng, k * dim, -1.0, 1.0);
    std::vector<std::uint32_t> ia(n), ib(n);
    std::vector<double> da(n), db(n);
    nearest_center(rows, dim, centers, k, ia, da, Backend::Serial);
    nearest_center(rows, dim, centers, k, ib, db, Backend::OpenMp);
    CHECK(ia == ib);
    CHECK(bitwise_equal(da, db));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = rows[i * dim + d] - centers[j * dim + d];
                d2 += diff * diff;
            }
            CHECK(da[i] <= d2 + 1e-18);
        }
    }

    // Two identical centers: the winner must be index 0.
    const std::vector<double> dup{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    const std::vector<double> one_row{0.4, 0.6, 0.5};
    std::vector<std::uint32_t> assign(1);
    nearest_center(one_row, 3, dup, 2, assign, {}, Backend::Serial);
    CHECK(assign[0] == 0);
}

TEST_CASE("tanh projection: backends agree, values match direct evaluation") {
    Rng rng(1003);
    const std::size_t n = 33, dim = 4, h = 9;
    const auto rows = random_vec(rng, n * dim, -1.5, 1.5);
    const auto weights = random_vec(rng, h * dim, -1.0, 1.0);
    const auto bias = random_vec(rng, h, -0.5, 0.5);
    std::vector<double> a(n * h), b(n * h);
    tanh_projection(rows, dim, weights, bias, a, Backend::Serial);
    tanh_projection(rows, dim, weights, bias, b, Backend::OpenMp);
    CHECK(bitwise_equal(a, b));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            double z = bias[j];
            for (std::size_t d = 0; d < dim; ++d) {
                z += weights[j * dim + d] * rows[i * dim + d];
            }
            CHECK(a[i * h + j] == std::tanh(z));
        }
    }
}

TEST_CASE("anfis rule count") {
    CHECK(anfis_rule_count(2, 3) == 9);
    CHECK(anfis_rule_count(1, 2) == 2);
    CHECK(anfis_rule_count(3, 3) == 27);
    CHECK(anfis_rule_count(4, 2) == 16);
}

TEST_CASE("anfis design matrix: backends agree, firing strengths normalized") {
    Rng rng(1004);
    for (std::size_t dim : {1u, 2u, 3u}) {
        for (std::size_t m : {2u, 3u}) {
            const std::size_t n = 25;
            const std::size_t rules = anfis_rule_count(dim, m);
            const auto rows = random_vec(rng, n * dim, 0.0, 1.0);
            const auto centers = random_vec(rng, dim * m, 0.0, 1.0);
            const auto widths = random_vec(rng, dim * m, 0.2, 0.8);
            std::vector<double> da(n * rules * (dim + 1)), db(da.size());
            std::vector<double> fa(n * rules), fb(n * rules);
            anfis_design_matrix(rows, dim, centers, widths, m, da, fa,
                                Backend::Serial);
            anfis_design_matrix(rows, dim, centers, widths, m, db, fb,
                                Backend::OpenMp);
            CHECK(bitwise_equal(da, db));
            CHECK(bitwise_equal(fa, fb));
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (std::size_t r = 0; r < rules; ++r) {
                    const double nf = fa[i * rules + r];
                    CHECK(nf >= 0.0);
                    sum += nf;
                    // Design block r is nf_r * [x; 1].
                    CHECK(da[i * rules * (dim + 1) + r * (dim + 1) + dim] ==
                          doctest::Approx(nf).epsilon(1e-15));
                    for (std::size_t d = 0; d < dim; ++d) {
                        CHECK(da[i * rules * (dim + 1) + r * (dim + 1) + d] ==
                              doctest::Approx(nf * rows[i * dim + d])
                                  .epsilon(1e-14));
                    }
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("anfis design matrix: full underflow yields uniform strengths") {
    // A point astronomically far from every membership function underflows
    // all rule strengths to zero; the kernel falls back to uniform weights.
    const std::size_t dim = 2, m = 2;
    const std::size_t rules = anfis_rule_count(dim, m);
    const std::vector<double> rows{1e8, 1e8};
    const std::vector<double> centers{0.0, 0.1, 0.0, 0.1};
    const std::vector<double> widths{1e-3, 1e-3, 1e-3, 1e-3};
    std::vector<double> design(rules * (dim + 1));
    std::vector<double> firing(rules);
    anfis_design_matrix(rows, dim, centers, widths, m, design, firing,
                        Backend::Serial);
    for (std::size_t r = 0; r < rules; ++r) {
        CHECK(firing[r] == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("anfis gradient terms: row sums match finite differences") {
    Rng rng(1005);
    const std::size_t dim = 2, m = 3, n = 30;
    const std::size_t rules = anfis_rule_count(dim, m);
    const std::size_t p_count = 2 * dim * m;
    const auto rows = random_vec(rng, n * dim, 0.0, 1.0);
    const auto targets = random_vec(rng, n, 0.0, 1.0);
    auto centers = random_vec(rng, dim * m, 0.0, 1.0);
    auto widths = random_vec(rng, dim * m, 0.2, 0.8);
    const auto consequents = random_vec(rng, rules * (dim + 1), -1.0, 1.0);

    auto mse_at = [&](const std::vector<double>& c, const std::vector<double>& w) {
        std::vector<double> design(n * rules * (dim + 1));
        anfis_design_matrix(rows, dim, c, w, m, design, {}, Backend::Serial);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = 0; j < rules * (dim + 1); ++j) {
                f += design[i * rules * (dim + 1) + j] * consequents[j];
            }
            const double e = f - targets[i];
            acc += e * e;
        }
        return acc / static_cast<double>(n);
    };

    std::vector<double> terms(n * p_count);
    std::vector<double> preds(n);
    anfis_gradient_terms(rows, dim, targets, centers, widths, m, consequents,
                         terms, preds, Backend::Serial);
    std::vector<double> terms2(n * p_count), preds2(n);
    anfis_gradient_terms(rows, dim, targets, centers, widths, m, consequents,
                         terms2, preds2, Backend::OpenMp);
    CHECK(bitwise_equal(terms, terms2));
    CHECK(bitwise_equal(preds, preds2));

    std::vector<double> grad(p_count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < p_count; ++p) {
            grad[p] += terms[i * p_count + p];
        }
    }

    const double h = 1e-6;
    for (std::size_t p = 0; p < p_count; ++p) {
        auto cp = centers;
        auto cm = centers;
        auto wp = widths;
        auto wm = widths;
        if (p < dim * m) {
            cp[p] += h;
            cm[p] -= h;
        } else {
            wp[p - dim * m] += h;
            wm[p - dim * m] -= h;
        }
        const double fd = (mse_at(cp, wp) - mse_at(cm, wm)) / (2.0 * h);
        CHECK(std::fabs(fd - grad[p]) / std::max(1.0, std::fabs(fd)) < 1e-6);
    }
}

TEST_CASE("owa objective batch: backends agree and match direct evaluation") {
    Rng rng(1006);
    const std::size_t n = 50, cand = 101;
    const auto yhat = random_vec(rng, n, -1.0, 1.0);
    const auto ohat = random_vec(rng, n, -1.0, 1.0);
    const auto targets = random_vec(rng, n, -1.0, 1.0);
    std::vector<double> c1(cand);
    for (std::size_t i = 0; i < cand; ++i) {
        c1[i] = static_cast<double>(i) / static_cast<double>(cand - 1);
    }
    std::vector<double> a(cand), b(cand);
    owa_objective_batch(c1, yhat, ohat, targets, a, Backend::Serial);
    owa_objective_batch(c1, yhat, ohat, targets, b, Backend::OpenMp);
    CHECK(bitwise_equal(a, b));
    for (std::size_t i = 0; i < cand; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double f = c1[i] * yhat[j] + (1.0 - c1[i]) * ohat[j];
            const double e = f - targets[j];
            acc += e * e;
        }
        CHECK(a[i] == doctest::Approx(acc / static_cast<double>(n)).epsilon(1e-14));
    }
}
