#include "lstmad/synth.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lstmad/rng.hpp"

namespace lstmad {

void SynthConfig::validate() const {
    if (length < 1) throw std::invalid_argument("synth: length must be >= 1");
    if (period < 1) throw std::invalid_argument("synth: period must be >= 1");
    if (noise_sigma < 0.0) {
        throw std::invalid_argument("synth: noise_sigma must be >= 0");
    }
    if (interval_seconds < 1) {
        throw std::invalid_argument("synth: interval_seconds must be >= 1");
    }
    for (const Burst& b : bursts) {
        if (b.start < 0 || b.start >= length) {
            throw std::invalid_argument("synth: burst start outside series");
        }
        if (b.duration < 1) {
            throw std::invalid_argument("synth: burst duration must be >= 1");
        }
        if (b.start + b.duration > length) {
            throw std::invalid_argument("synth: burst extends past series end");
        }
    }
}

LabeledSeries generate(const SynthConfig& config) {
    config.validate();
    LabeledSeries out;
    out.series.start_time = config.start_time;
    out.series.interval_seconds = config.interval_seconds;
    out.series.metric = config.metric;
    out.series.values.reserve(static_cast<std::size_t>(config.length));
    out.labels.assign(static_cast<std::size_t>(config.length), 0);

    for (const Burst& b : config.bursts) {
        for (std::int64_t t = b.start; t < b.start + b.duration; ++t) {
            out.labels[static_cast<std::size_t>(t)] = 1;
        }
    }

    Rng rng(config.seed);
    for (std::int64_t t = 0; t < config.length; ++t) {
        // phase from t mod period keeps the noiseless series exactly
        // periodic (identical sin arguments every cycle)
        const double phase =
            static_cast<double>(t % config.period) / static_cast<double>(config.period);
        double v = config.mean + config.amplitude * std::sin(2.0 * M_PI * phase);
        if (config.noise_sigma > 0.0) {
            v += config.noise_sigma * rng.gaussian();
        }
        if (out.labels[static_cast<std::size_t>(t)] != 0) {
            for (const Burst& b : config.bursts) {
                if (t >= b.start && t < b.start + b.duration) {
                    v *= b.multiplier;
                    break;
                }
            }
        }
        out.series.values.push_back(std::max(0.0, v));
    }
    return out;
}

namespace {

LabeledSeries slice(const LabeledSeries& src, std::int64_t begin, std::int64_t end) {
    LabeledSeries out;
    out.series.start_time =
        src.series.start_time + begin * src.series.interval_seconds;
    out.series.interval_seconds = src.series.interval_seconds;
    out.series.metric = src.series.metric;
    out.series.values.assign(src.series.values.begin() + begin,
                             src.series.values.begin() + end);
    out.labels.assign(src.labels.begin() + begin, src.labels.begin() + end);
    return out;
}

} // namespace

SplitSeries split(const LabeledSeries& labeled, const SplitFractions& fractions) {
    const double sum = fractions.train + fractions.valid + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split: fractions must sum to 1");
    }
    if (fractions.train <= 0.0 || fractions.valid <= 0.0 || fractions.test <= 0.0) {
        throw std::invalid_argument("split: fractions must be positive");
    }
    const std::int64_t n = static_cast<std::int64_t>(labeled.series.values.size());
    const auto b1 = static_cast<std::int64_t>(std::floor(fractions.train * n));
    const auto b2 = static_cast<std::int64_t>(
        std::floor((fractions.train + fractions.valid) * n));
    if (b1 < 1 || b2 <= b1 || b2 >= n) {
        throw std::invalid_argument("split: series too short for these fractions");
    }
    for (std::int64_t t = 0; t < b2; ++t) {
        if (labeled.labels[static_cast<std::size_t>(t)] != 0) {
            throw std::runtime_error("attack leakage into normal split");
        }
    }
    SplitSeries out;
    out.train = slice(labeled, 0, b1);
    out.valid = slice(labeled, b1, b2);
    out.test = slice(labeled, b2, n);
    return out;
}

std::string write_labels_csv(const std::vector<char>& labels) {
    std::string out = "index,label\n";
    char buf[32];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%d\n", i, labels[i] != 0 ? 1 : 0);
        out += buf;
    }
    return out;
}

std::vector<char> load_labels_csv(std::string_view text) {
    std::size_t pos = text.find('\n');
    std::string_view header = text.substr(0, pos);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != "index,label") {
        throw std::runtime_error("bad header");
    }
    std::vector<char> labels;
    std::string_view rest =
        pos == std::string_view::npos ? std::string_view{} : text.substr(pos + 1);
    std::int64_t expected = 0;
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        std::string_view line =
            nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{}
                                            : rest.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        if (c1 == std::string_view::npos) {
            throw std::runtime_error("bad row: " + std::string(line));
        }
        std::int64_t index = 0;
        auto r1 = std::from_chars(line.data(), line.data() + c1, index);
        int value = 0;
        auto r2 = std::from_chars(line.data() + c1 + 1, line.data() + line.size(), value);
        if (r1.ec != std::errc() || r2.ec != std::errc() || index != expected) {
            throw std::runtime_error("bad row: " + std::string(line));
        }
        labels.push_back(value != 0 ? 1 : 0);
        ++expected;
    }
    return labels;
}

std::vector<Burst> parse_bursts(const std::string& text) {
    std::vector<Burst> bursts;
    if (text.empty()) return bursts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(pos, end - pos);
        const std::size_t s1 = item.find(':');
        const std::size_t s2 =
            s1 == std::string::npos ? std::string::npos : item.find(':', s1 + 1);
        if (s1 == std::string::npos || s2 == std::string::npos) {
            throw std::invalid_argument("bad burst spec: " + item);
        }
        Burst b;
        b.start = std::stoll(item.substr(0, s1));
        b.duration = std::stoll(item.substr(s1 + 1, s2 - s1 - 1));
        b.multiplier = std::stod(item.substr(s2 + 1));
        bursts.push_back(b);
        pos = end + 1;
        if (end == text.size()) break;
    }
    return bursts;
}

} // namespace lstmad
