#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "txlife/thermal.hpp"

namespace txlife::synthesis {

/// Hourly load and ambient series. Hours are consecutive integers; loads are
/// per-unit and non-negative; ambients are finite deg C.
struct HourlyProfile {
    std::vector<std::int64_t> hours;
    std::vector<double> load_pu;
    std::vector<double> ambient_c;
};

/// Throws unless lengths match, size >= 2, hours are consecutive, loads are
/// >= 0 and ambients finite.
void validate(const HourlyProfile& profile);

/// Shape of the synthetic year: a base load with daily and weekly cycles,
/// and an ambient with seasonal and daily cycles. Noise terms are uniform in
/// [-amplitude, +amplitude].
struct ProfileConfig {
    double base_load_pu = 0.7;
    double daily_load_amplitude = 0.25;
    double weekly_load_amplitude = 0.05;
    double load_noise_amplitude = 0.03;
    double base_ambient_c = 15.0;
    double seasonal_ambient_amplitude = 10.0;
    double daily_ambient_amplitude = 5.0;
    double ambient_noise_amplitude = 1.0;
};

/// Throws unless the base load is > 0 and every amplitude is >= 0 and finite.
void validate(const ProfileConfig& config);

/// Deterministic synthetic profile for a given seed. Load and ambient are
/// fixed sinusoids (daily trough at hour 0, seasonal trough at hour 0 of a
/// 8760 h year, weekly cycle of 168 h in sine phase) plus bounded uniform
/// noise; two noise draws per hour, load first. Loads are clipped at 0.
HourlyProfile generate_profile(std::size_t hours, const ProfileConfig& config,
                               std::uint64_t seed);

enum class SplitTag : std::uint8_t { Train, Test };

/// Aligned feature rows and hourly loss-of-life targets. feature_dim is 2
/// for (load_pu, ambient_c) and 4 once lagged features are added.
struct Dataset {
    std::vector<std::int64_t> hours;
    std::vector<double> features;  ///< row-major, feature_dim per row
    std::size_t feature_dim = 2;
    std::vector<std::string> feature_names;
    std::vector<double> targets;  ///< percent loss of life for the row's hour
    std::vector<SplitTag> split;  ///< all Train until split_dataset runs
};

void validate(const Dataset& ds);

std::size_t count_split(const Dataset& ds, SplitTag tag);

/// Runs the thermal recursion over the profile, starting from the steady
/// state of the first hour's load, and emits one percent-LOL increment per
/// hour (interval length 1 h). Pure: equal inputs give equal outputs.
Dataset synthesize_targets(const HourlyProfile& profile,
                           const thermal::TransformerParams& params);

/// Random, seed-deterministic train/test partition. The train row count is
/// round(train_fraction * rows); both sides must end up non-empty.
Dataset split_dataset(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// Adds the previous hour's (load_pu, ambient_c) as two extra features and
/// drops the first row, which has no predecessor. Requires feature_dim == 2.
Dataset with_lagged_features(const Dataset& ds);

/// CSV with header `hour,load_pu,ambient_c`.
HourlyProfile read_profile_csv(const std::filesystem::path& path);
void write_profile_csv(const HourlyProfile& profile,
                       const std::filesystem::path& path);

/// CSV with header `hour,load_pu,ambient_c,lol_percent,split`; only
/// two-feature datasets are written (lagged features are a derived view).
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace txlife::synthesis
