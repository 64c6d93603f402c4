#include "lstmad/series_csv.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace lstmad {

namespace {

// Strip one trailing '\r' so CRLF input still parses.
std::string_view chomp(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string_view next_line(std::string_view& rest) {
    const std::size_t nl = rest.find('\n');
    std::string_view line;
    if (nl == std::string_view::npos) {
        line = rest;
        rest = {};
    } else {
        line = rest.substr(0, nl);
        rest.remove_prefix(nl + 1);
    }
    return chomp(line);
}

std::int64_t parse_i64(std::string_view s, const char* what) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw std::runtime_error(std::string("bad ") + what + " field");
    }
    return v;
}

double parse_f64(std::string_view s, const char* what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw std::runtime_error(std::string("bad ") + what + " field");
    }
    return v;
}

} // namespace

SeriesCsv load_series_csv(std::string_view text) {
    std::string_view rest = text;
    if (next_line(rest) != "index,timestamp,value") {
        throw std::runtime_error("bad header");
    }

    SeriesCsv out;
    std::int64_t expected_index = 0;
    std::int64_t prev_ts = 0;
    while (!rest.empty()) {
        const std::string_view line = next_line(rest);
        if (line.empty()) continue;

        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string_view::npos
                                   ? std::string_view::npos
                                   : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
            throw std::runtime_error("bad row: " + std::string(line));
        }
        const std::int64_t index = parse_i64(line.substr(0, c1), "index");
        const std::int64_t ts = parse_i64(line.substr(c1 + 1, c2 - c1 - 1), "timestamp");
        const double value = parse_f64(line.substr(c2 + 1), "value");

        if (index != expected_index) {
            throw std::runtime_error("non-contiguous series");
        }
        if (expected_index == 0) {
            out.start_time = ts;
        } else if (expected_index == 1) {
            if (ts <= prev_ts) throw std::runtime_error("non-contiguous series");
            out.interval_seconds = ts - prev_ts;
        }
        prev_ts = ts;
        out.values.push_back(value);
        ++expected_index;
    }
    if (out.values.empty()) {
        throw std::runtime_error("empty series");
    }
    return out;
}

std::string write_series_csv(std::int64_t start_time,
                             std::int64_t interval_seconds,
                             std::span<const double> values) {
    std::string out = "index,timestamp,value\n";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::int64_t ts =
            start_time + static_cast<std::int64_t>(i) * interval_seconds;
        std::snprintf(buf, sizeof(buf), "%zu,%lld,%.12g\n", i,
                      static_cast<long long>(ts), values[i]);
        out += buf;
    }
    return out;
}

} // namespace lstmad
