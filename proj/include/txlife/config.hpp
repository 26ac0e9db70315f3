#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "txlife/estimators.hpp"
#include "txlife/fusion.hpp"
#include "txlife/synthesis.hpp"
#include "txlife/thermal.hpp"

namespace txlife::config {

/// Parses flat `key = value` text. '#' starts a comment line, blank lines are
/// skipped, keys may appear once. Malformed lines raise ParseError with a
/// 1-based line number; duplicate keys raise ConfigError.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Transformer parameter file: one `key = value` line per TransformerParams
/// field, using exactly the field names. Missing keys keep their defaults,
/// unknown keys raise ConfigError, and the result is validated.
thermal::TransformerParams params_from_text(const std::string& text);
std::string params_to_text(const thermal::TransformerParams& params);
thermal::TransformerParams read_params_file(const std::filesystem::path& path);
void write_params_file(const thermal::TransformerParams& params,
                       const std::filesystem::path& path);

/// Everything one pipeline run needs. Loaded from a flat key=value file;
/// every field has a default so an empty config is valid. The `seed` fans
/// out to per-stage seeds with fixed offsets (see pipeline.hpp).
struct RunConfig {
    std::string params_file;  ///< optional TransformerParams file
    std::string profile_csv;  ///< optional measured profile; skips generation

    std::size_t hours = 8760;
    synthesis::ProfileConfig profile;
    double train_fraction = 0.7;
    bool lagged_features = false;

    estimators::RbfConfig rbf;
    estimators::AnfisConfig anfis;
    estimators::MlpConfig mlp;
    fusion::GaConfig ga;
    /// Multiplier on the train-split-optimized per-hour process noise; 1
    /// keeps the optimizer's choice.
    double kalman_q_scale = 1.0;

    std::uint64_t seed = 42;
    std::string out_dir = "out";
};

void validate(const RunConfig& config);

/// Parses a run config; keys are documented by run_config_to_text. Unknown
/// keys raise ConfigError.
RunConfig run_config_from_text(const std::string& text);

/// Canonical serialization: fixed key order, shortest round-trip numbers.
/// Identical configs serialize identically; this text (minus out_dir) is
/// what config hashes are computed over.
std::string run_config_to_text(const RunConfig& config);

/// Reads a run config file; an empty path yields the defaults.
RunConfig read_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a over bytes, rendered as "fnv1a64:<16 hex digits>".
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes);

/// Hash of the run config with out_dir blanked, so artifact directories can
/// be relocated without breaking manifest checks.
std::string config_hash(const RunConfig& config);
std::string params_hash(const thermal::TransformerParams& params);

}  // namespace txlife::config
