#include "txlife/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace txlife::kernels {

bool openmp_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

Backend initial_backend() {
    if (const char* env = std::getenv("TXLIFE_BACKEND")) {
        if (std::strcmp(env, "serial") == 0) return Backend::Serial;
        if (std::strcmp(env, "openmp") == 0) return Backend::OpenMp;
    }
    return openmp_available() ? Backend::OpenMp : Backend::Serial;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{initial_backend()};
    return slot;
}

// Per-element cores shared by both backends; the backends differ only in how
// the row loop is scheduled, which is what the equality tests pin down.

inline double squared_distance(const double* a, const double* b, std::size_t dim) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        d2 += diff * diff;
    }
    return d2;
}

inline void gaussian_design_row(const double* x, std::size_t dim,
                                const double* centers, const double* widths,
                                std::size_t k, double* out) {
    for (std::size_t j = 0; j < k; ++j) {
        const double d2 = squared_distance(x, centers + j * dim, dim);
        out[j] = std::exp(-d2 / (2.0 * widths[j] * widths[j]));
    }
    out[k] = 1.0;
}

inline void nearest_center_row(const double* x, std::size_t dim,
                               const double* centers, std::size_t k,
                               std::uint32_t* assign, double* dist2) {
    std::uint32_t best = 0;
    double best_d2 = squared_distance(x, centers, dim);
    for (std::size_t j = 1; j < k; ++j) {
        const double d2 = squared_distance(x, centers + j * dim, dim);
        if (d2 < best_d2) {  // strict: ties keep the lowest index
            best_d2 = d2;
            best = static_cast<std::uint32_t>(j);
        }
    }
    *assign = best;
    if (dist2 != nullptr) *dist2 = best_d2;
}

inline void tanh_projection_row(const double* x, std::size_t dim,
                                const double* weights, const double* bias,
                                std::size_t h, double* out) {
    for (std::size_t j = 0; j < h; ++j) {
        const double* w = weights + j * dim;
        double z = bias[j];
        for (std::size_t k = 0; k < dim; ++k) {
            z += w[k] * x[k];
        }
        out[j] = std::tanh(z);
    }
}

// Raw rule firing strengths for one row; returns their sum. A grid point far
// from every membership function can underflow the sum to zero, in which case
// callers fall back to uniform normalized strengths.
inline double anfis_firing_row(const double* x, std::size_t dim,
                               const double* mf_centers, const double* mf_widths,
                               std::size_t m, std::size_t rules, double* w) {
    // Memberships per (input, mf).
    double mu[64];  // dim * m <= 64 enforced by the estimators module config
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double c = mf_centers[i * m + j];
            const double s = mf_widths[i * m + j];
            const double dx = x[i] - c;
            mu[i * m + j] = std::exp(-(dx * dx) / (2.0 * s * s));
        }
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < rules; ++r) {
        // Mixed-radix digits of r, first input most significant.
        std::size_t rem = r;
        std::size_t divisor = rules / m;
        double prod = 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const std::size_t digit = rem / divisor;
            rem %= divisor;
            if (divisor > 1) divisor /= m;
            prod *= mu[i * m + digit];
        }
        w[r] = prod;
        sum += prod;
    }
    return sum;
}

inline void anfis_design_row(const double* x, std::size_t dim,
                             const double* mf_centers, const double* mf_widths,
                             std::size_t m, std::size_t rules,
                             double* design, double* firing) {
    double w[1024];  // rules <= 1024: m^dim bounded by the config validation
    const double sum = anfis_firing_row(x, dim, mf_centers, mf_widths, m, rules, w);
    const double inv = sum > 0.0 ? 1.0 / sum : 0.0;
    for (std::size_t r = 0; r < rules; ++r) {
        const double nf = sum > 0.0 ? w[r] * inv : 1.0 / static_cast<double>(rules);
        if (firing != nullptr) firing[r] = nf;
        double* row = design + r * (dim + 1);
        for (std::size_t k = 0; k < dim; ++k) {
            row[k] = nf * x[k];
        }
        row[dim] = nf;
    }
}

inline void anfis_gradient_row(const double* x, std::size_t dim, double target,
                               const double* mf_centers, const double* mf_widths,
                               std::size_t m, std::size_t rules,
                               const double* consequents, double* terms,
                               double* prediction, std::size_t n_rows) {
    double w[1024];
    const double sum = anfis_firing_row(x, dim, mf_centers, mf_widths, m, rules, w);

    double rule_out[1024];
    double f = 0.0;
    const double inv = sum > 0.0 ? 1.0 / sum : 0.0;
    for (std::size_t r = 0; r < rules; ++r) {
        const double* a = consequents + r * (dim + 1);
        double g = a[dim];
        for (std::size_t k = 0; k < dim; ++k) {
            g += a[k] * x[k];
        }
        rule_out[r] = g;
        const double nf = sum > 0.0 ? w[r] * inv : 1.0 / static_cast<double>(rules);
        f += nf * g;
    }
    *prediction = f;

    const std::size_t param_count = 2 * dim * m;
    for (std::size_t p = 0; p < param_count; ++p) {
        terms[p] = 0.0;
    }
    if (sum <= 0.0) {
        return;  // flat region: no usable premise gradient for this row
    }

    // d(err^2)/d(theta) summed over rules that use MF (i, j):
    //   2*err * (g_r - f) * w_r / sum * dln(mu_ij)/d(theta)
    const double err_scale = 2.0 * (f - target) / static_cast<double>(n_rows);
    for (std::size_t r = 0; r < rules; ++r) {
        const double common = err_scale * (rule_out[r] - f) * w[r] * inv;
        std::size_t rem = r;
        std::size_t divisor = rules / m;
        for (std::size_t i = 0; i < dim; ++i) {
            const std::size_t digit = rem / divisor;
            rem %= divisor;
            if (divisor > 1) divisor /= m;
            const double c = mf_centers[i * m + digit];
            const double s = mf_widths[i * m + digit];
            const double dx = x[i] - c;
            terms[i * m + digit] += common * dx / (s * s);
            terms[dim * m + i * m + digit] += common * dx * dx / (s * s * s);
        }
    }
}

inline double owa_objective_one(double c1, const double* yhat, const double* ohat,
                                const double* targets, std::size_t n) {
    const double c2 = 1.0 - c1;
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const double diff = c1 * yhat[s] + c2 * ohat[s] - targets[s];
        acc += diff * diff;
    }
    return acc / static_cast<double>(n);
}

}  // namespace

Backend default_backend() { return backend_slot().load(); }

void set_default_backend(Backend backend) { backend_slot().store(backend); }

void gaussian_design(std::span<const double> rows, std::size_t dim,
                     std::span<const double> centers, std::span<const double> widths,
                     std::span<double> out, Backend backend) {
    const std::size_t n = rows.size() / dim;
    const std::size_t k = widths.size();
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            gaussian_design_row(rows.data() + i * dim, dim, centers.data(),
                                widths.data(), k, out.data() + i * (k + 1));
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        gaussian_design_row(rows.data() + i * dim, dim, centers.data(),
                            widths.data(), k, out.data() + i * (k + 1));
    }
}

void nearest_center(std::span<const double> rows, std::size_t dim,
                    std::span<const double> centers, std::size_t center_count,
                    std::span<std::uint32_t> assign, std::span<double> dist2,
                    Backend backend) {
    const std::size_t n = rows.size() / dim;
    double* d2 = dist2.empty() ? nullptr : dist2.data();
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            nearest_center_row(rows.data() + i * dim, dim, centers.data(),
                               center_count, assign.data() + i,
                               d2 != nullptr ? d2 + i : nullptr);
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        nearest_center_row(rows.data() + i * dim, dim, centers.data(), center_count,
                           assign.data() + i, d2 != nullptr ? d2 + i : nullptr);
    }
}

void tanh_projection(std::span<const double> rows, std::size_t dim,
                     std::span<const double> weights, std::span<const double> bias,
                     std::span<double> out, Backend backend) {
    const std::size_t n = rows.size() / dim;
    const std::size_t h = bias.size();
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            tanh_projection_row(rows.data() + i * dim, dim, weights.data(),
                                bias.data(), h, out.data() + i * h);
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        tanh_projection_row(rows.data() + i * dim, dim, weights.data(), bias.data(),
                            h, out.data() + i * h);
    }
}

std::size_t anfis_rule_count(std::size_t dim, std::size_t mfs_per_input) {
    std::size_t rules = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        rules *= mfs_per_input;
    }
    return rules;
}

void anfis_design_matrix(std::span<const double> rows, std::size_t dim,
                         std::span<const double> mf_centers,
                         std::span<const double> mf_widths,
                         std::size_t mfs_per_input,
                         std::span<double> design, std::span<double> firing,
                         Backend backend) {
    const std::size_t n = rows.size() / dim;
    const std::size_t rules = anfis_rule_count(dim, mfs_per_input);
    const std::size_t row_width = rules * (dim + 1);
    double* fire = firing.empty() ? nullptr : firing.data();
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            anfis_design_row(rows.data() + i * dim, dim, mf_centers.data(),
                             mf_widths.data(), mfs_per_input, rules,
                             design.data() + i * row_width,
                             fire != nullptr ? fire + i * rules : nullptr);
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        anfis_design_row(rows.data() + i * dim, dim, mf_centers.data(),
                         mf_widths.data(), mfs_per_input, rules,
                         design.data() + i * row_width,
                         fire != nullptr ? fire + i * rules : nullptr);
    }
}

void anfis_gradient_terms(std::span<const double> rows, std::size_t dim,
                          std::span<const double> targets,
                          std::span<const double> mf_centers,
                          std::span<const double> mf_widths,
                          std::size_t mfs_per_input,
                          std::span<const double> consequents,
                          std::span<double> grad_terms,
                          std::span<double> predictions, Backend backend) {
    const std::size_t n = rows.size() / dim;
    const std::size_t rules = anfis_rule_count(dim, mfs_per_input);
    const std::size_t param_count = 2 * dim * mfs_per_input;
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            anfis_gradient_row(rows.data() + i * dim, dim, targets[i],
                               mf_centers.data(), mf_widths.data(), mfs_per_input,
                               rules, consequents.data(),
                               grad_terms.data() + i * param_count,
                               predictions.data() + i, n);
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) {
        anfis_gradient_row(rows.data() + i * dim, dim, targets[i], mf_centers.data(),
                           mf_widths.data(), mfs_per_input, rules, consequents.data(),
                           grad_terms.data() + i * param_count,
                           predictions.data() + i, n);
    }
}

void owa_objective_batch(std::span<const double> c1_candidates,
                         std::span<const double> yhat, std::span<const double> ohat,
                         std::span<const double> targets, std::span<double> out,
                         Backend backend) {
    const std::size_t m = c1_candidates.size();
    const std::size_t n = targets.size();
    if (backend == Backend::OpenMp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(m); ++c) {
            out[c] = owa_objective_one(c1_candidates[c], yhat.data(), ohat.data(),
                                       targets.data(), n);
        }
        return;
#endif
    }
    for (std::size_t c = 0; c < m; ++c) {
        out[c] = owa_objective_one(c1_candidates[c], yhat.data(), ohat.data(),
                                   targets.data(), n);
    }
}

}  // namespace txlife::kernels
