#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpnet/errors.hpp"

// Minimal CSV helpers shared by the readers and writers. Fields never
// contain quoted commas in any of the formats this library speaks.
namespace cpnet::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        out.emplace_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    // std::from_chars for double is available in libstdc++ 11.
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Shortest representation that round-trips exactly.
inline std::string format(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Locates the named columns in a header row. In strict mode the header
// must consist of exactly the required columns (any order); lenient mode
// ignores extras.
inline std::vector<std::size_t> map_header(const std::vector<std::string>& header,
                                           const std::vector<std::string>& required,
                                           bool lenient) {
    std::vector<std::size_t> idx(required.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto it = std::find(required.begin(), required.end(), header[c]);
        if (it == required.end()) {
            if (!lenient) throw ParseError(1, "unknown column '" + header[c] + "'");
            continue;
        }
        auto k = static_cast<std::size_t>(it - required.begin());
        if (idx[k] != std::numeric_limits<std::size_t>::max())
            throw ParseError(1, "duplicate column '" + header[c] + "'");
        idx[k] = c;
    }
    for (std::size_t k = 0; k < required.size(); ++k)
        if (idx[k] == std::numeric_limits<std::size_t>::max())
            throw ParseError(1, "missing column '" + required[k] + "'");
    return idx;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError("cannot open " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    return out;
}

} // namespace cpnet::csv
