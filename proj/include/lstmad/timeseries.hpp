#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lstmad {

/// Which per-interval feature is extracted from the capture.
enum class Metric { packets, bytes, tcp_syn };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// One decoded capture record. Timestamps are epoch seconds plus a
/// microsecond remainder (always < 1'000'000).
struct PacketRecord {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_usec = 0;
    std::uint32_t captured_len = 0;
    std::uint32_t original_len = 0;
    bool is_tcp_syn = false;
};

/// Unscaled per-interval counts. Values are non-negative and finite.
struct RawSeries {
    std::int64_t start_time = 0;
    std::int64_t interval_seconds = 600;
    std::vector<double> values;
    Metric metric = Metric::packets;
};

/// Min-max range captured from the training split.
struct Scaler {
    double train_min = 0.0;
    double train_max = 1.0;
};

/// Unit-interval series ready for the sigmoid output layer.
struct TimeSeries {
    std::int64_t start_time = 0;
    std::int64_t interval_seconds = 600;
    std::vector<double> values;
    Scaler scaler;
};

/// Sum the chosen metric into fixed-duration bins covering [start, end).
/// Records outside the window are ignored; empty bins stay at zero.
RawSeries bin_events(std::span<const PacketRecord> records,
                     std::int64_t start_time,
                     std::int64_t end_time,
                     std::int64_t interval_seconds,
                     Metric metric);

/// Single-threaded reference for bin_events; results are bit-identical.
RawSeries bin_events_serial(std::span<const PacketRecord> records,
                            std::int64_t start_time,
                            std::int64_t end_time,
                            std::int64_t interval_seconds,
                            Metric metric);

/// Capture the min-max range of a training series.
/// Throws "degenerate series: zero range" when all values are identical.
Scaler fit_scaler(const RawSeries& raw);

/// Map values through the scaler into [0, 1]; out-of-range values clamp.
TimeSeries apply_scaler(const Scaler& scaler, const RawSeries& raw);

} // namespace lstmad
