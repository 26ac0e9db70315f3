// Timing harness for the batch kernels: runs each one on both backends,
// reports wall time and speedup, and checks the outputs agree bitwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <vector>

#include "txlife/kernels.hpp"
#include "txlife/rng.hpp"

using txlife::Rng;
using txlife::kernels::Backend;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int repeats) {
    // one warm-up pass, then the best of `repeats` timed passes
    body();
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        body();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::fabs(a[i] - b[i]));
    }
    return worst;
}

std::vector<double> randn(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

void report(const char* name, double serial_ms, double openmp_ms, double diff) {
    std::printf("%-22s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx   max|diff| %g\n",
                name, serial_ms, openmp_ms, serial_ms / openmp_ms, diff);
}

}  // namespace

int main() {
    Rng rng(12345);
    const std::size_t n = 20000;
    const std::size_t dim = 2;
    const int repeats = 5;

    const std::vector<double> rows = randn(n * dim, rng);

    {
        const std::size_t k = 64;
        const std::vector<double> centers = randn(k * dim, rng);
        const std::vector<double> widths = randn(k, rng, 0.2, 1.5);
        std::vector<double> out_s(n * (k + 1)), out_p(n * (k + 1));
        const double ms_s = time_ms(
            [&] {
                txlife::kernels::gaussian_design(rows, dim, centers, widths, out_s,
                                                 Backend::Serial);
            },
            repeats);
        const double ms_p = time_ms(
            [&] {
                txlife::kernels::gaussian_design(rows, dim, centers, widths, out_p,
                                                 Backend::OpenMp);
            },
            repeats);
        report("gaussian_design", ms_s, ms_p, max_abs_diff(out_s, out_p));
    }

    {
        const std::size_t mfs = 4;
        const std::size_t rules = txlife::kernels::anfis_rule_count(dim, mfs);
        const std::vector<double> mf_centers = randn(dim * mfs, rng);
        const std::vector<double> mf_widths = randn(dim * mfs, rng, 0.3, 1.2);
        std::vector<double> design_s(n * rules * (dim + 1));
        std::vector<double> design_p(design_s.size());
        const double ms_s = time_ms(
            [&] {
                txlife::kernels::anfis_design_matrix(rows, dim, mf_centers, mf_widths,
                                                     mfs, design_s, {}, Backend::Serial);
            },
            repeats);
        const double ms_p = time_ms(
            [&] {
                txlife::kernels::anfis_design_matrix(rows, dim, mf_centers, mf_widths,
                                                     mfs, design_p, {}, Backend::OpenMp);
            },
            repeats);
        report("anfis_design_matrix", ms_s, ms_p, max_abs_diff(design_s, design_p));
    }

    {
        const std::size_t hidden = 64;
        const std::vector<double> weights = randn(hidden * dim, rng);
        const std::vector<double> bias = randn(hidden, rng);
        std::vector<double> out_s(n * hidden), out_p(n * hidden);
        const double ms_s = time_ms(
            [&] {
                txlife::kernels::tanh_projection(rows, dim, weights, bias, out_s,
                                                 Backend::Serial);
            },
            repeats);
        const double ms_p = time_ms(
            [&] {
                txlife::kernels::tanh_projection(rows, dim, weights, bias, out_p,
                                                 Backend::OpenMp);
            },
            repeats);
        report("tanh_projection", ms_s, ms_p, max_abs_diff(out_s, out_p));
    }

    {
        const std::size_t candidates = 512;
        const std::vector<double> c1 = randn(candidates, rng, 0.0, 1.0);
        const std::vector<double> yhat = randn(n, rng);
        const std::vector<double> ohat = randn(n, rng);
        const std::vector<double> targets = randn(n, rng);
        std::vector<double> out_s(candidates), out_p(candidates);
        const double ms_s = time_ms(
            [&] {
                txlife::kernels::owa_objective_batch(c1, yhat, ohat, targets, out_s,
                                                     Backend::Serial);
            },
            repeats);
        const double ms_p = time_ms(
            [&] {
                txlife::kernels::owa_objective_batch(c1, yhat, ohat, targets, out_p,
                                                     Backend::OpenMp);
            },
            repeats);
        report("owa_objective_batch", ms_s, ms_p, max_abs_diff(out_s, out_p));
    }

    return 0;
}
