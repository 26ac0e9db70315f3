#include "txlife/synthesis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string_view>

#include "txlife/csv.hpp"
#include "txlife/errors.hpp"
#include "txlife/rng.hpp"

namespace txlife::synthesis {

namespace {

constexpr double kHoursPerDay = 24.0;
constexpr double kHoursPerWeek = 168.0;
constexpr double kHoursPerYear = 8760.0;

void require_amplitude(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidInputError(std::string(name) + " must be finite and >= 0");
    }
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

}  // namespace

void validate(const HourlyProfile& profile) {
    const std::size_t n = profile.hours.size();
    if (profile.load_pu.size() != n || profile.ambient_c.size() != n) {
        throw ShapeError("profile series lengths differ: hours " + std::to_string(n) +
                         ", load " + std::to_string(profile.load_pu.size()) +
                         ", ambient " + std::to_string(profile.ambient_c.size()));
    }
    if (n < 2) {
        throw InvalidInputError("profile needs at least 2 hours, got " +
                                std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && profile.hours[i] != profile.hours[i - 1] + 1) {
            throw InvalidInputError("profile hours must be consecutive; index " +
                                    std::to_string(i) + " jumps from " +
                                    std::to_string(profile.hours[i - 1]) + " to " +
                                    std::to_string(profile.hours[i]));
        }
        if (!std::isfinite(profile.load_pu[i]) || profile.load_pu[i] < 0.0) {
            throw InvalidInputError("load_pu at index " + std::to_string(i) +
                                    " must be finite and >= 0");
        }
        if (!std::isfinite(profile.ambient_c[i])) {
            throw InvalidInputError("ambient_c at index " + std::to_string(i) +
                                    " must be finite");
        }
    }
}

void validate(const ProfileConfig& config) {
    if (!std::isfinite(config.base_load_pu) || !(config.base_load_pu > 0.0)) {
        throw InvalidInputError("base_load_pu must be finite and > 0");
    }
    if (!std::isfinite(config.base_ambient_c)) {
        throw InvalidInputError("base_ambient_c must be finite");
    }
    require_amplitude(config.daily_load_amplitude, "daily_load_amplitude");
    require_amplitude(config.weekly_load_amplitude, "weekly_load_amplitude");
    require_amplitude(config.load_noise_amplitude, "load_noise_amplitude");
    require_amplitude(config.seasonal_ambient_amplitude, "seasonal_ambient_amplitude");
    require_amplitude(config.daily_ambient_amplitude, "daily_ambient_amplitude");
    require_amplitude(config.ambient_noise_amplitude, "ambient_noise_amplitude");
}

HourlyProfile generate_profile(std::size_t hours, const ProfileConfig& config,
                               std::uint64_t seed) {
    if (hours < 24) {
        throw InvalidInputError("profile generation needs hours >= 24, got " +
                                std::to_string(hours));
    }
    validate(config);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double half_pi = std::numbers::pi / 2.0;
    Rng rng(seed);
    HourlyProfile profile;
    profile.hours.reserve(hours);
    profile.load_pu.reserve(hours);
    profile.ambient_c.reserve(hours);
    for (std::size_t i = 0; i < hours; ++i) {
        const double h = static_cast<double>(i);
        const double daily = std::sin(two_pi * h / kHoursPerDay - half_pi);
        const double weekly = std::sin(two_pi * h / kHoursPerWeek);
        const double seasonal = std::sin(two_pi * h / kHoursPerYear - half_pi);
        const double load_noise =
            config.load_noise_amplitude * (2.0 * rng.uniform() - 1.0);
        const double ambient_noise =
            config.ambient_noise_amplitude * (2.0 * rng.uniform() - 1.0);
        const double load = config.base_load_pu +
                            config.daily_load_amplitude * daily +
                            config.weekly_load_amplitude * weekly + load_noise;
        const double ambient = config.base_ambient_c +
                               config.seasonal_ambient_amplitude * seasonal +
                               config.daily_ambient_amplitude * daily +
                               ambient_noise;
        profile.hours.push_back(static_cast<std::int64_t>(i));
        profile.load_pu.push_back(std::max(load, 0.0));
        profile.ambient_c.push_back(ambient);
    }
    validate(profile);
    return profile;
}

void validate(const Dataset& ds) {
    if (ds.feature_dim == 0) {
        throw InvalidInputError("feature_dim must be >= 1");
    }
    if (ds.feature_names.size() != ds.feature_dim) {
        throw ShapeError("feature_names has " + std::to_string(ds.feature_names.size()) +
                         " entries for feature_dim " + std::to_string(ds.feature_dim));
    }
    const std::size_t n = ds.targets.size();
    if (n == 0) {
        throw EmptyInputError("dataset has no rows");
    }
    if (ds.hours.size() != n || ds.split.size() != n ||
        ds.features.size() != n * ds.feature_dim) {
        throw ShapeError("dataset columns misaligned: " + std::to_string(n) +
                         " targets, " + std::to_string(ds.hours.size()) + " hours, " +
                         std::to_string(ds.split.size()) + " split tags, " +
                         std::to_string(ds.features.size()) + " feature values");
    }
    for (std::size_t i = 0; i < ds.features.size(); ++i) {
        if (!std::isfinite(ds.features[i])) {
            throw InvalidInputError("feature value at flat index " + std::to_string(i) +
                                    " is not finite");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ds.targets[i])) {
            throw InvalidInputError("target at row " + std::to_string(i) +
                                    " is not finite");
        }
    }
}

std::size_t count_split(const Dataset& ds, SplitTag tag) {
    std::size_t count = 0;
    for (const SplitTag t : ds.split) {
        if (t == tag) ++count;
    }
    return count;
}

Dataset synthesize_targets(const HourlyProfile& profile,
                           const thermal::TransformerParams& params) {
    validate(profile);
    thermal::validate(params);

    const std::size_t n = profile.hours.size();
    Dataset ds;
    ds.feature_dim = 2;
    ds.feature_names = {"load_pu", "ambient_c"};
    ds.hours = profile.hours;
    ds.features.reserve(n * 2);
    ds.targets.reserve(n);
    ds.split.assign(n, SplitTag::Train);

    thermal::ThermalState state = thermal::steady_state(profile.load_pu[0], params);
    for (std::size_t i = 0; i < n; ++i) {
        thermal::ThermalStepInput in;
        in.load_prev_pu = profile.load_pu[i > 0 ? i - 1 : 0];
        in.load_now_pu = profile.load_pu[i];
        in.ambient_c = profile.ambient_c[i];
        in.dt_hours = 1.0;
        const thermal::ThermalStepResult res = thermal::step_thermal(state, in, params);
        state = res.state;
        ds.features.push_back(profile.load_pu[i]);
        ds.features.push_back(profile.ambient_c[i]);
        ds.targets.push_back(thermal::percent_loss_of_life(res.faa, 1.0, params));
    }
    return ds;
}

Dataset split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    validate(ds);
    if (!std::isfinite(train_fraction) || !(train_fraction > 0.0) ||
        !(train_fraction < 1.0)) {
        throw InvalidInputError("train_fraction must lie in (0, 1), got " +
                                std::to_string(train_fraction));
    }
    const std::size_t n = ds.targets.size();
    const auto train_count = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    if (train_count == 0 || train_count == n) {
        throw InvalidInputError("train_fraction " + std::to_string(train_fraction) +
                                " leaves an empty split for " + std::to_string(n) +
                                " rows");
    }
    Rng rng(seed);
    const std::vector<std::size_t> train_rows =
        rng.sample_without_replacement(n, train_count);
    Dataset out = ds;
    out.split.assign(n, SplitTag::Test);
    for (const std::size_t row : train_rows) {
        out.split[row] = SplitTag::Train;
    }
    return out;
}

Dataset with_lagged_features(const Dataset& ds) {
    validate(ds);
    if (ds.feature_dim != 2) {
        throw ShapeError("lagged features need a 2-feature dataset, got feature_dim " +
                         std::to_string(ds.feature_dim));
    }
    const std::size_t n = ds.targets.size();
    if (n < 2) {
        throw InvalidInputError("lagged features need at least 2 rows");
    }
    Dataset out;
    out.feature_dim = 4;
    out.feature_names = {"load_pu", "ambient_c", "load_pu_lag1", "ambient_c_lag1"};
    out.hours.reserve(n - 1);
    out.features.reserve((n - 1) * 4);
    out.targets.reserve(n - 1);
    out.split.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        out.hours.push_back(ds.hours[i]);
        out.features.push_back(ds.features[i * 2]);
        out.features.push_back(ds.features[i * 2 + 1]);
        out.features.push_back(ds.features[(i - 1) * 2]);
        out.features.push_back(ds.features[(i - 1) * 2 + 1]);
        out.targets.push_back(ds.targets[i]);
        out.split.push_back(ds.split[i]);
    }
    return out;
}

HourlyProfile read_profile_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) {
        throw SchemaError(path.string() + " is empty; expected header " +
                          "hour,load_pu,ambient_c");
    }
    if (lines[0] != "hour,load_pu,ambient_c") {
        throw SchemaError(path.string() + ": expected header hour,load_pu,ambient_c" +
                          ", got '" + lines[0] + "'");
    }
    HourlyProfile profile;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::size_t line_no = i + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        }
        const long long hour = csv::parse_int(fields[0], line_no, "hour");
        const double load = csv::parse_double(fields[1], line_no, "load_pu");
        const double ambient = csv::parse_double(fields[2], line_no, "ambient_c");
        if (!std::isfinite(load) || load < 0.0) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": load_pu must be finite and >= 0");
        }
        if (!std::isfinite(ambient)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": ambient_c must be finite");
        }
        profile.hours.push_back(hour);
        profile.load_pu.push_back(load);
        profile.ambient_c.push_back(ambient);
    }
    validate(profile);
    return profile;
}

void write_profile_csv(const HourlyProfile& profile,
                       const std::filesystem::path& path) {
    validate(profile);
    std::string text = "hour,load_pu,ambient_c\n";
    for (std::size_t i = 0; i < profile.hours.size(); ++i) {
        text += csv::format_int(profile.hours[i]);
        text += ',';
        text += csv::format_double(profile.load_pu[i]);
        text += ',';
        text += csv::format_double(profile.ambient_c[i]);
        text += '\n';
    }
    write_text(path, text);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);
    const std::string header = "hour,load_pu,ambient_c,lol_percent,split";
    if (lines.empty()) {
        throw SchemaError(path.string() + " is empty; expected header " + header);
    }
    if (lines[0] != header) {
        throw SchemaError(path.string() + ": expected header " + header + ", got '" +
                          lines[0] + "'");
    }
    Dataset ds;
    ds.feature_dim = 2;
    ds.feature_names = {"load_pu", "ambient_c"};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::size_t line_no = i + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 5) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        }
        const long long hour = csv::parse_int(fields[0], line_no, "hour");
        const double load = csv::parse_double(fields[1], line_no, "load_pu");
        const double ambient = csv::parse_double(fields[2], line_no, "ambient_c");
        const double target = csv::parse_double(fields[3], line_no, "lol_percent");
        if (!std::isfinite(load) || load < 0.0) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": load_pu must be finite and >= 0");
        }
        if (!std::isfinite(ambient) || !std::isfinite(target)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": numeric fields must be finite");
        }
        SplitTag tag;
        if (fields[4] == "train") {
            tag = SplitTag::Train;
        } else if (fields[4] == "test") {
            tag = SplitTag::Test;
        } else {
            throw ParseError("line " + std::to_string(line_no) +
                             ": split must be 'train' or 'test', got '" +
                             std::string(fields[4]) + "'");
        }
        ds.hours.push_back(hour);
        ds.features.push_back(load);
        ds.features.push_back(ambient);
        ds.targets.push_back(target);
        ds.split.push_back(tag);
    }
    validate(ds);
    return ds;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
    validate(ds);
    if (ds.feature_dim != 2) {
        throw ShapeError("dataset CSV stores 2-feature rows, got feature_dim " +
                         std::to_string(ds.feature_dim));
    }
    std::string text = "hour,load_pu,ambient_c,lol_percent,split\n";
    for (std::size_t i = 0; i < ds.targets.size(); ++i) {
        text += csv::format_int(ds.hours[i]);
        text += ',';
        text += csv::format_double(ds.features[i * 2]);
        text += ',';
        text += csv::format_double(ds.features[i * 2 + 1]);
        text += ',';
        text += csv::format_double(ds.targets[i]);
        text += ',';
        text += ds.split[i] == SplitTag::Train ? "train" : "test";
        text += '\n';
    }
    write_text(path, text);
}

}  // namespace txlife::synthesis
