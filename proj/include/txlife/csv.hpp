#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "txlife/errors.hpp"

// Locale-independent number formatting/parsing for the CSV files the
// library writes and reads. std::to_chars emits the shortest decimal string
// that round-trips the exact double, which keeps files byte-stable across
// runs and platforms.
namespace txlife::csv {

inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

/// Parses a full token as a double; throws ParseError naming the 1-based
/// line on trailing garbage, empty tokens, or non-numeric input.
inline double parse_double(std::string_view token, std::size_t line_no,
                           std::string_view column) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                         std::string(token) + "' as number for column " +
                         std::string(column));
    }
    return value;
}

inline long long parse_int(std::string_view token, std::size_t line_no,
                           std::string_view column) {
    long long value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" +
                         std::string(token) + "' as integer for column " +
                         std::string(column));
    }
    return value;
}

}  // namespace txlife::csv
