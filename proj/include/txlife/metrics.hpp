#pragma once

#include <span>
#include <string>
#include <vector>

namespace txlife::metrics {

/// Mean squared error between equally long, nonempty series.
double mse(std::span<const double> pred, std::span<const double> target);

/// Coefficient of determination, 1 - SS_res / SS_tot with SS_tot taken about
/// the target mean. Requires nonzero target variance. The mean predictor
/// scores exactly 0; a perfect predictor scores exactly 1; values <= 1.
double r_squared(std::span<const double> pred, std::span<const double> target);

/// One row of the comparative results table.
struct MethodReport {
    std::string method;  ///< ANFIS | RBF | MLP | OWA | KALMAN
    double mse = 0.0;
    double r2 = 0.0;
    int rank = 0;  ///< assigned by rank_methods
};

/// "Data fusion" for the fusion stages (OWA, KALMAN), "Machine learning"
/// for the estimators.
std::string method_category(const std::string& method);

/// Sorts by ascending MSE (rank 1 = lowest), breaking ties by higher R2 and
/// then by method name, and writes 1-based ranks. Method names must be
/// distinct.
std::vector<MethodReport> rank_methods(std::vector<MethodReport> reports);

/// Aligned-text table (Category / Method / MSE / R2 / Rank) of ranked rows.
std::string format_table(const std::vector<MethodReport>& ranked);

}  // namespace txlife::metrics
