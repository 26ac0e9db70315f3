#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "txlife/config.hpp"
#include "txlife/errors.hpp"

using namespace txlife;
using namespace txlife::config;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("key=value parsing") {
    const auto values = parse_key_values(
        "# comment\n"
        "\n"
        "alpha = 1\n"
        "  beta=  two words  \r\n"
        "gamma =\n");
    CHECK(values.size() == 3);
    CHECK(values.at("alpha") == "1");
    CHECK(values.at("beta") == "two words");
    CHECK(values.at("gamma").empty());

    CHECK_THROWS_AS(parse_key_values("novalue\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse_key_values("a = 1\nbroken line\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(parse_key_values("= 1\n"), ParseError);
    CHECK_THROWS_AS(parse_key_values("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("params round trip through text") {
    const thermal::TransformerParams defaults;
    const thermal::TransformerParams parsed = params_from_text(params_to_text(defaults));
    CHECK(parsed.delta_theta_to_rated == defaults.delta_theta_to_rated);
    CHECK(parsed.tau_w == defaults.tau_w);
    CHECK(parsed.life_const_a == defaults.life_const_a);
    CHECK(parsed.normal_insulation_life == defaults.normal_insulation_life);
    CHECK(params_to_text(parsed) == params_to_text(defaults));
}

TEST_CASE("params partial override and rejects") {
    const thermal::TransformerParams p = params_from_text("tau_to = 2.5\n");
    CHECK(p.tau_to == 2.5);
    CHECK(p.tau_w == thermal::TransformerParams{}.tau_w);

    CHECK_THROWS_AS(params_from_text("bogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(params_from_text("tau_to = fast\n"), ConfigError);
    // validation runs on the parsed result
    CHECK_THROWS_AS(params_from_text("tau_to = -1\n"), InvalidInputError);
}

TEST_CASE("params file io") {
    const auto path = temp_file("txlife_test_params.txt");
    const thermal::TransformerParams defaults;
    write_params_file(defaults, path);
    const thermal::TransformerParams back = read_params_file(path);
    CHECK(params_to_text(back) == params_to_text(defaults));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_params_file(temp_file("txlife_missing_params.txt")), IoError);
}

TEST_CASE("run config defaults and canonical text") {
    const RunConfig defaults;
    CHECK_NOTHROW(validate(defaults));
    const RunConfig parsed = run_config_from_text(run_config_to_text(defaults));
    CHECK(run_config_to_text(parsed) == run_config_to_text(defaults));
    CHECK(parsed.hours == 8760);
    CHECK(parsed.seed == 42);
    CHECK(parsed.train_fraction == 0.7);
    CHECK_FALSE(parsed.lagged_features);

    // empty text keeps every default
    const RunConfig empty = run_config_from_text("");
    CHECK(run_config_to_text(empty) == run_config_to_text(defaults));
}

TEST_CASE("run config overrides") {
    const RunConfig c = run_config_from_text(
        "hours = 48\n"
        "seed = 7\n"
        "train_fraction = 0.8\n"
        "lagged_features = true\n"
        "rbf_centers = 10\n"
        "ga_population = 12\n"
        "kalman_q_scale = 0.5\n"
        "out_dir = results\n");
    CHECK(c.hours == 48);
    CHECK(c.seed == 7);
    CHECK(c.train_fraction == 0.8);
    CHECK(c.lagged_features);
    CHECK(c.rbf.center_count == 10);
    CHECK(c.ga.population == 12);
    CHECK(c.kalman_q_scale == 0.5);
    CHECK(c.out_dir == "results");
}

TEST_CASE("run config rejects") {
    CHECK_THROWS_AS(run_config_from_text("mystery = 1\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("hours = 12\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("train_fraction = 1\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("train_fraction = 0\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("kalman_q_scale = 0\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("rbf_centers = -3\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("ga_population = 1\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("lagged_features = maybe\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("hours = abc\n"), ConfigError);

    // referenced paths must exist when the config is loaded
    CHECK_THROWS_AS(run_config_from_text("params_file = no_such_params.txt\n"),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_text("profile_csv = no_such_profile.csv\n"),
                    ConfigError);

    // a measured profile lifts the minimum-hours rule
    const auto profile_path = temp_file("txlife_cfg_profile.csv");
    std::ofstream(profile_path) << "hour,load_pu,ambient_c\n0,1.0,30.0\n";
    CHECK_NOTHROW(run_config_from_text("hours = 12\nprofile_csv = " +
                                       profile_path.string() + "\n"));
    std::filesystem::remove(profile_path);
}

TEST_CASE("read_run_config") {
    CHECK(run_config_to_text(read_run_config({})) == run_config_to_text(RunConfig{}));

    const auto path = temp_file("txlife_test_run.cfg");
    std::ofstream(path) << "seed = 99\n";
    CHECK(read_run_config(path).seed == 99);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_run_config(temp_file("txlife_missing_run.cfg")), IoError);
}

TEST_CASE("hashing") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    // FNV-1a of "a" (standard test vector)
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hash_hex("a") == "fnv1a64:af63dc4c8601ec8c");

    RunConfig a;
    RunConfig b;
    CHECK(config_hash(a) == config_hash(b));
    b.out_dir = "elsewhere";  // location does not change identity
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 43;
    CHECK(config_hash(a) != config_hash(b));

    const thermal::TransformerParams defaults;
    thermal::TransformerParams tweaked;
    tweaked.tau_to = 2.0;
    CHECK(params_hash(defaults) != params_hash(tweaked));
    CHECK(params_hash(defaults) == params_hash(thermal::TransformerParams{}));
}
