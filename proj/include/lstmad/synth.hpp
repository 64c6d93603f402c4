#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lstmad/timeseries.hpp"

namespace lstmad {

/// Sustained traffic burst: steps [start, start+duration) are multiplied
/// by `multiplier`.
struct Burst {
    std::int64_t start = 0;
    std::int64_t duration = 1;
    double multiplier = 3.0;
};

struct SynthConfig {
    std::int64_t length = 1000;
    double mean = 1000.0;      // baseline rate per interval
    double amplitude = 150.0;  // diurnal swing around the mean
    std::int64_t period = 144; // steps per diurnal cycle
    double noise_sigma = 5.0;
    std::vector<Burst> bursts;
    std::uint64_t seed = 42;
    std::int64_t start_time = 0;
    std::int64_t interval_seconds = 600;
    Metric metric = Metric::packets;

    void validate() const;
};

/// A generated series plus per-step attack labels.
struct LabeledSeries {
    RawSeries series;
    std::vector<char> labels; // 1 inside any burst
};

/// value_t = max(0, mean + amplitude*sin(2*pi*t/period) + N(0, sigma)),
/// multiplied by the burst factor inside bursts. Deterministic per seed.
LabeledSeries generate(const SynthConfig& config);

struct SplitFractions {
    double train = 0.5;
    double valid = 0.25;
    double test = 0.25;
};

struct SplitSeries {
    LabeledSeries train;
    LabeledSeries valid;
    LabeledSeries test;
};

/// Contiguous chronological split. Throws
/// "attack leakage into normal split" if a burst-labeled step lands in
/// the train or valid part.
SplitSeries split(const LabeledSeries& labeled, const SplitFractions& fractions);

/// CSV with header `index,label`.
std::string write_labels_csv(const std::vector<char>& labels);
std::vector<char> load_labels_csv(std::string_view text);

/// "start:duration:multiplier[,start:duration:multiplier...]"
std::vector<Burst> parse_bursts(const std::string& text);

} // namespace lstmad
