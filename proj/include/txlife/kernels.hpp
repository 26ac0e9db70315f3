#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace txlife::kernels {

/// Execution backend for the data-parallel kernels. Both backends compute
/// every output element with the same scalar expression and perform any
/// reduction serially in index order, so results are bit-identical across
/// backends and thread counts. The serial variants are the reference
/// implementations the parallel ones are tested against (see test_kernels
/// and the txlife-bench tool).
enum class Backend { Serial, OpenMp };

/// True when the library was compiled with OpenMP support.
bool openmp_available();

/// Number of threads an OpenMp-backend kernel would use (1 without OpenMP).
int max_threads();

/// Process-wide default backend: OpenMp when available, else Serial.
/// Overridable via set_default_backend or the TXLIFE_BACKEND environment
/// variable ("serial" / "openmp"), read once at first use.
Backend default_backend();
void set_default_backend(Backend backend);

/// Gaussian design matrix with a trailing bias column.
/// out[i*(k+1)+j] = exp(-|x_i - c_j|^2 / (2 w_j^2)) for j < k, out[i*(k+1)+k] = 1.
/// rows is n x dim row-major, centers k x dim, widths k (all > 0).
void gaussian_design(std::span<const double> rows, std::size_t dim,
                     std::span<const double> centers, std::span<const double> widths,
                     std::span<double> out, Backend backend);

/// Nearest-center assignment: assign[i] = argmin_j |x_i - c_j|^2 with ties
/// resolved to the lowest center index; dist2[i] receives the winning
/// squared distance (pass an empty span to skip it).
void nearest_center(std::span<const double> rows, std::size_t dim,
                    std::span<const double> centers, std::size_t center_count,
                    std::span<std::uint32_t> assign, std::span<double> dist2,
                    Backend backend);

/// tanh(W x + b) feature map: out[i*h+j] = tanh(dot(weights_j, x_i) + bias_j).
/// weights is h x dim row-major.
void tanh_projection(std::span<const double> rows, std::size_t dim,
                     std::span<const double> weights, std::span<const double> bias,
                     std::span<double> out, Backend backend);

/// Number of Takagi-Sugeno rules for a grid partition: mfs_per_input^dim.
std::size_t anfis_rule_count(std::size_t dim, std::size_t mfs_per_input);

/// First-order Takagi-Sugeno design matrix under a grid partition of
/// Gaussian membership functions.
///
/// mf_centers/mf_widths are dim x mfs_per_input row-major. Rule r maps to the
/// MF combination given by the mixed-radix digits of r, first input most
/// significant. With R rules and normalized firing strengths nf_r(x):
///   design[i*R*(dim+1) + r*(dim+1) + k] = nf_r(x_i) * x_i[k]   (k < dim)
///   design[i*R*(dim+1) + r*(dim+1) + dim] = nf_r(x_i)
/// firing, when non-empty (n x R), receives the normalized strengths.
void anfis_design_matrix(std::span<const double> rows, std::size_t dim,
                         std::span<const double> mf_centers,
                         std::span<const double> mf_widths,
                         std::size_t mfs_per_input,
                         std::span<double> design, std::span<double> firing,
                         Backend backend);

/// Per-row contributions to the gradient of the scaled-space train MSE with
/// respect to the premise parameters, holding consequents fixed.
///
/// consequents is R x (dim+1) row-major. Parameter layout (P = 2*dim*M):
/// all MF centers (dim x M row-major) followed by all MF widths. grad_terms
/// is n x P; summing its rows in index order (as anfis_premise_gradient in
/// the estimators module does) yields the exact batch gradient. predictions
/// (size n) receives the model output per row.
void anfis_gradient_terms(std::span<const double> rows, std::size_t dim,
                          std::span<const double> targets,
                          std::span<const double> mf_centers,
                          std::span<const double> mf_widths,
                          std::size_t mfs_per_input,
                          std::span<const double> consequents,
                          std::span<double> grad_terms,
                          std::span<double> predictions, Backend backend);

/// Mean squared error of the convex combination c1*yhat + (1-c1)*ohat against
/// targets, for a batch of candidate c1 values (one objective per candidate).
/// Parallel across candidates; each candidate's sum runs in index order.
void owa_objective_batch(std::span<const double> c1_candidates,
                         std::span<const double> yhat, std::span<const double> ohat,
                         std::span<const double> targets, std::span<double> out,
                         Backend backend);

}  // namespace txlife::kernels
