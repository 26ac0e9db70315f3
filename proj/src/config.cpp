#include "txlife/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "txlife/csv.hpp"
#include "txlife/errors.hpp"

namespace txlife::config {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
}

/// Typed accessors over a parsed key=value map; tracks which keys were
/// consumed so finish() can reject unknown ones.
class Reader {
public:
    explicit Reader(std::map<std::string, std::string> values)
        : values_(std::move(values)) {}

    double get_double(const std::string& key, double fallback) {
        const std::string* raw = take(key);
        if (!raw) return fallback;
        double value = 0.0;
        const char* begin = raw->data();
        const char* end = begin + raw->size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError("key '" + key + "': cannot parse '" + *raw +
                              "' as a number");
        }
        return value;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) {
        const std::string* raw = take(key);
        if (!raw) return fallback;
        std::int64_t value = 0;
        const char* begin = raw->data();
        const char* end = begin + raw->size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError("key '" + key + "': cannot parse '" + *raw +
                              "' as an integer");
        }
        return value;
    }

    std::size_t get_size(const std::string& key, std::size_t fallback) {
        const std::int64_t value = get_int(key, static_cast<std::int64_t>(fallback));
        if (value < 0) {
            throw ConfigError("key '" + key + "': value must be >= 0");
        }
        return static_cast<std::size_t>(value);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        const std::string* raw = take(key);
        if (!raw) return fallback;
        std::uint64_t value = 0;
        const char* begin = raw->data();
        const char* end = begin + raw->size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError("key '" + key + "': cannot parse '" + *raw +
                              "' as an unsigned integer");
        }
        return value;
    }

    bool get_flag(const std::string& key, bool fallback) {
        const std::string* raw = take(key);
        if (!raw) return fallback;
        if (*raw == "1" || *raw == "true") return true;
        if (*raw == "0" || *raw == "false") return false;
        throw ConfigError("key '" + key + "': expected 0/1/true/false, got '" +
                          *raw + "'");
    }

    std::string get_string(const std::string& key, std::string fallback) {
        const std::string* raw = take(key);
        return raw ? *raw : std::move(fallback);
    }

    void finish() const {
        for (const auto& [key, value] : values_) {
            if (!consumed_.count(key)) {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    }

private:
    const std::string* take(const std::string& key) {
        consumed_.insert(key);
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed while reading " + path.string());
    }
    return buffer.str();
}

void write_text_file(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void append_line(std::string& text, const std::string& key, const std::string& value) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
}

void append_double(std::string& text, const std::string& key, double value) {
    append_line(text, key, csv::format_double(value));
}

void append_size(std::string& text, const std::string& key, std::size_t value) {
    append_line(text, key, std::to_string(value));
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> values;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t stop = std::min(text.find('\n', start), text.size());
        std::string line = text.substr(start, stop - start);
        start = stop + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        }
        if (!values.emplace(key, value).second) {
            throw ConfigError("duplicate key '" + key + "' (line " +
                              std::to_string(line_no) + ")");
        }
    }
    return values;
}

thermal::TransformerParams params_from_text(const std::string& text) {
    Reader reader(parse_key_values(text));
    thermal::TransformerParams p;
    p.delta_theta_to_rated = reader.get_double("delta_theta_to_rated", p.delta_theta_to_rated);
    p.delta_theta_h_rated = reader.get_double("delta_theta_h_rated", p.delta_theta_h_rated);
    p.loss_ratio_r = reader.get_double("loss_ratio_r", p.loss_ratio_r);
    p.exp_n = reader.get_double("exp_n", p.exp_n);
    p.exp_m = reader.get_double("exp_m", p.exp_m);
    p.tau_to = reader.get_double("tau_to", p.tau_to);
    p.tau_w = reader.get_double("tau_w", p.tau_w);
    p.life_const_a = reader.get_double("life_const_a", p.life_const_a);
    p.life_const_b = reader.get_double("life_const_b", p.life_const_b);
    p.ref_hotspot_kelvin = reader.get_double("ref_hotspot_kelvin", p.ref_hotspot_kelvin);
    p.aging_rate_kelvin = reader.get_double("aging_rate_kelvin", p.aging_rate_kelvin);
    p.normal_insulation_life = reader.get_double("normal_insulation_life", p.normal_insulation_life);
    reader.finish();
    thermal::validate(p);
    return p;
}

std::string params_to_text(const thermal::TransformerParams& params) {
    std::string text = "# transformer thermal parameters\n";
    append_double(text, "delta_theta_to_rated", params.delta_theta_to_rated);
    append_double(text, "delta_theta_h_rated", params.delta_theta_h_rated);
    append_double(text, "loss_ratio_r", params.loss_ratio_r);
    append_double(text, "exp_n", params.exp_n);
    append_double(text, "exp_m", params.exp_m);
    append_double(text, "tau_to", params.tau_to);
    append_double(text, "tau_w", params.tau_w);
    append_double(text, "life_const_a", params.life_const_a);
    append_double(text, "life_const_b", params.life_const_b);
    append_double(text, "ref_hotspot_kelvin", params.ref_hotspot_kelvin);
    append_double(text, "aging_rate_kelvin", params.aging_rate_kelvin);
    append_double(text, "normal_insulation_life", params.normal_insulation_life);
    return text;
}

thermal::TransformerParams read_params_file(const std::filesystem::path& path) {
    try {
        return params_from_text(read_text_file(path));
    } catch (Error& e) {
        e.add_context(path.string());
        throw;
    }
}

void write_params_file(const thermal::TransformerParams& params,
                       const std::filesystem::path& path) {
    write_text_file(params_to_text(params), path);
}

void validate(const RunConfig& config) {
    if (!config.params_file.empty() && !std::filesystem::exists(config.params_file)) {
        throw ConfigError("params_file does not exist: " + config.params_file);
    }
    if (!config.profile_csv.empty() && !std::filesystem::exists(config.profile_csv)) {
        throw ConfigError("profile_csv does not exist: " + config.profile_csv);
    }
    if (config.profile_csv.empty() && config.hours < 24) {
        throw ConfigError("hours must be at least 24");
    }
    if (!(config.train_fraction > 0.0) || !(config.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    if (!std::isfinite(config.kalman_q_scale) || config.kalman_q_scale <= 0.0) {
        throw ConfigError("kalman_q_scale must be finite and > 0");
    }
    synthesis::validate(config.profile);
    estimators::validate(config.rbf);
    const std::size_t dim = config.lagged_features ? 4 : 2;
    estimators::validate(config.anfis, dim);
    estimators::validate(config.mlp);
    fusion::validate(config.ga);
}

RunConfig run_config_from_text(const std::string& text) {
    Reader reader(parse_key_values(text));
    RunConfig c;
    c.params_file = reader.get_string("params_file", c.params_file);
    c.profile_csv = reader.get_string("profile_csv", c.profile_csv);

    c.hours = reader.get_size("hours", c.hours);
    c.profile.base_load_pu = reader.get_double("base_load_pu", c.profile.base_load_pu);
    c.profile.daily_load_amplitude =
        reader.get_double("daily_load_amplitude", c.profile.daily_load_amplitude);
    c.profile.weekly_load_amplitude =
        reader.get_double("weekly_load_amplitude", c.profile.weekly_load_amplitude);
    c.profile.load_noise_amplitude =
        reader.get_double("load_noise_amplitude", c.profile.load_noise_amplitude);
    c.profile.base_ambient_c = reader.get_double("base_ambient_c", c.profile.base_ambient_c);
    c.profile.seasonal_ambient_amplitude = reader.get_double(
        "seasonal_ambient_amplitude", c.profile.seasonal_ambient_amplitude);
    c.profile.daily_ambient_amplitude = reader.get_double(
        "daily_ambient_amplitude", c.profile.daily_ambient_amplitude);
    c.profile.ambient_noise_amplitude = reader.get_double(
        "ambient_noise_amplitude", c.profile.ambient_noise_amplitude);

    c.train_fraction = reader.get_double("train_fraction", c.train_fraction);
    c.lagged_features = reader.get_flag("lagged_features", c.lagged_features);

    c.rbf.center_count = reader.get_size("rbf_centers", c.rbf.center_count);
    c.rbf.ridge = reader.get_double("rbf_ridge", c.rbf.ridge);
    c.rbf.kmeans_max_iters =
        reader.get_size("rbf_kmeans_max_iters", c.rbf.kmeans_max_iters);
    c.anfis.mfs_per_input = reader.get_size("anfis_mfs", c.anfis.mfs_per_input);
    c.anfis.epochs = reader.get_size("anfis_epochs", c.anfis.epochs);
    c.anfis.learning_rate =
        reader.get_double("anfis_learning_rate", c.anfis.learning_rate);
    c.mlp.hidden_units = reader.get_size("mlp_hidden", c.mlp.hidden_units);
    c.mlp.epochs = reader.get_size("mlp_epochs", c.mlp.epochs);
    c.mlp.learning_rate = reader.get_double("mlp_learning_rate", c.mlp.learning_rate);
    c.mlp.batch_size = reader.get_size("mlp_batch", c.mlp.batch_size);

    c.ga.population = reader.get_size("ga_population", c.ga.population);
    c.ga.generations = reader.get_size("ga_generations", c.ga.generations);
    c.ga.crossover_rate = reader.get_double("ga_crossover_rate", c.ga.crossover_rate);
    c.ga.mutation_rate = reader.get_double("ga_mutation_rate", c.ga.mutation_rate);
    c.ga.mutation_scale =
        reader.get_double("ga_mutation_scale", c.ga.mutation_scale);
    c.kalman_q_scale = reader.get_double("kalman_q_scale", c.kalman_q_scale);

    c.seed = reader.get_u64("seed", c.seed);
    c.out_dir = reader.get_string("out_dir", c.out_dir);
    reader.finish();
    validate(c);
    return c;
}

std::string run_config_to_text(const RunConfig& c) {
    std::string text;
    text += "# input files (blank = defaults / generated profile)\n";
    append_line(text, "params_file", c.params_file);
    append_line(text, "profile_csv", c.profile_csv);
    text += "\n# synthetic profile\n";
    append_size(text, "hours", c.hours);
    append_double(text, "base_load_pu", c.profile.base_load_pu);
    append_double(text, "daily_load_amplitude", c.profile.daily_load_amplitude);
    append_double(text, "weekly_load_amplitude", c.profile.weekly_load_amplitude);
    append_double(text, "load_noise_amplitude", c.profile.load_noise_amplitude);
    append_double(text, "base_ambient_c", c.profile.base_ambient_c);
    append_double(text, "seasonal_ambient_amplitude", c.profile.seasonal_ambient_amplitude);
    append_double(text, "daily_ambient_amplitude", c.profile.daily_ambient_amplitude);
    append_double(text, "ambient_noise_amplitude", c.profile.ambient_noise_amplitude);
    text += "\n# dataset\n";
    append_double(text, "train_fraction", c.train_fraction);
    append_line(text, "lagged_features", c.lagged_features ? "1" : "0");
    text += "\n# estimators\n";
    append_size(text, "rbf_centers", c.rbf.center_count);
    append_double(text, "rbf_ridge", c.rbf.ridge);
    append_size(text, "rbf_kmeans_max_iters", c.rbf.kmeans_max_iters);
    append_size(text, "anfis_mfs", c.anfis.mfs_per_input);
    append_size(text, "anfis_epochs", c.anfis.epochs);
    append_double(text, "anfis_learning_rate", c.anfis.learning_rate);
    append_size(text, "mlp_hidden", c.mlp.hidden_units);
    append_size(text, "mlp_epochs", c.mlp.epochs);
    append_double(text, "mlp_learning_rate", c.mlp.learning_rate);
    append_size(text, "mlp_batch", c.mlp.batch_size);
    text += "\n# fusion\n";
    append_size(text, "ga_population", c.ga.population);
    append_size(text, "ga_generations", c.ga.generations);
    append_double(text, "ga_crossover_rate", c.ga.crossover_rate);
    append_double(text, "ga_mutation_rate", c.ga.mutation_rate);
    append_double(text, "ga_mutation_scale", c.ga.mutation_scale);
    append_double(text, "kalman_q_scale", c.kalman_q_scale);
    text += "\n# run\n";
    append_line(text, "seed", std::to_string(c.seed));
    append_line(text, "out_dir", c.out_dir);
    return text;
}

RunConfig read_run_config(const std::filesystem::path& path) {
    if (path.empty()) return RunConfig{};
    try {
        return run_config_from_text(read_text_file(path));
    } catch (Error& e) {
        e.add_context(path.string());
        throw;
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string hash_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    const std::uint64_t hash = fnv1a64(bytes);
    std::string out = "fnv1a64:";
    for (int shift = 60; shift >= 0; shift -= 4) {
        out += digits[(hash >> shift) & 0xf];
    }
    return out;
}

std::string config_hash(const RunConfig& config) {
    RunConfig portable = config;
    portable.out_dir.clear();
    return hash_hex(run_config_to_text(portable));
}

std::string params_hash(const thermal::TransformerParams& params) {
    return hash_hex(params_to_text(params));
}

}  // namespace txlife::config
