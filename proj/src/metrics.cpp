#include "txlife/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "txlife/csv.hpp"
#include "txlife/errors.hpp"

namespace txlife::metrics {

namespace {

void check_series(std::span<const double> pred, std::span<const double> target) {
    if (pred.empty() || target.empty()) {
        throw EmptyInputError("metric input series must be nonempty");
    }
    if (pred.size() != target.size()) {
        throw ShapeError("series lengths differ: " + std::to_string(pred.size()) +
                         " vs " + std::to_string(target.size()));
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!std::isfinite(pred[i]) || !std::isfinite(target[i])) {
            throw InvalidInputError("metric input at index " + std::to_string(i) +
                                    " is not finite");
        }
    }
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> target) {
    check_series(pred, target);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        acc += e * e;
    }
    return acc / static_cast<double>(pred.size());
}

double r_squared(std::span<const double> pred, std::span<const double> target) {
    check_series(pred, target);
    double mean = 0.0;
    for (const double t : target) mean += t;
    mean /= static_cast<double>(target.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double r = pred[i] - target[i];
        const double d = target[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        throw DegenerateDataError("r_squared needs nonzero target variance");
    }
    return 1.0 - ss_res / ss_tot;
}

std::string method_category(const std::string& method) {
    if (method == "OWA" || method == "KALMAN") return "Data fusion";
    return "Machine learning";
}

std::vector<MethodReport> rank_methods(std::vector<MethodReport> reports) {
    if (reports.empty()) {
        throw EmptyInputError("rank_methods needs at least one report");
    }
    std::set<std::string> names;
    for (const MethodReport& r : reports) {
        if (!names.insert(r.method).second) {
            throw InvalidInputError("duplicate method name: " + r.method);
        }
        if (!std::isfinite(r.mse) || r.mse < 0.0) {
            throw InvalidInputError("mse for " + r.method + " must be finite and >= 0");
        }
    }
    std::sort(reports.begin(), reports.end(),
              [](const MethodReport& a, const MethodReport& b) {
                  if (a.mse != b.mse) return a.mse < b.mse;
                  if (a.r2 != b.r2) return a.r2 > b.r2;
                  return a.method < b.method;
              });
    for (std::size_t i = 0; i < reports.size(); ++i) {
        reports[i].rank = static_cast<int>(i) + 1;
    }
    return reports;
}

std::string format_table(const std::vector<MethodReport>& ranked) {
    if (ranked.empty()) {
        throw EmptyInputError("format_table needs at least one row");
    }
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Category", "Method", "MSE", "R2", "Rank"});
    for (const MethodReport& r : ranked) {
        cells.push_back({method_category(r.method), r.method, csv::format_double(r.mse),
                         csv::format_double(r.r2), std::to_string(r.rank)});
    }
    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) {
                out.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace txlife::metrics
