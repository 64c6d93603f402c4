#include "lstmad/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lstmad {

std::string metric_name(Metric m) {
    switch (m) {
    case Metric::packets:
        return "packets";
    case Metric::bytes:
        return "bytes";
    case Metric::tcp_syn:
        return "tcp_syn";
    }
    return "packets";
}

Metric metric_from_name(const std::string& name) {
    if (name == "packets") return Metric::packets;
    if (name == "bytes") return Metric::bytes;
    if (name == "tcp_syn") return Metric::tcp_syn;
    throw std::invalid_argument("unknown metric: " + name);
}

namespace {

// Contribution of one record under the chosen metric. Counts and byte
// totals stay integral, so summation order cannot change the result.
inline double metric_value(const PacketRecord& r, Metric m) {
    switch (m) {
    case Metric::packets:
        return 1.0;
    case Metric::bytes:
        return static_cast<double>(r.original_len);
    case Metric::tcp_syn:
        return r.is_tcp_syn ? 1.0 : 0.0;
    }
    return 0.0;
}

void check_window(std::int64_t start, std::int64_t end, std::int64_t interval) {
    if (end <= start) {
        throw std::invalid_argument("bin_events: end_time must be after start_time");
    }
    if (interval <= 0) {
        throw std::invalid_argument("bin_events: interval_seconds must be positive");
    }
}

std::int64_t bin_count(std::int64_t start, std::int64_t end, std::int64_t interval) {
    return (end - start + interval - 1) / interval;
}

} // namespace

RawSeries bin_events_serial(std::span<const PacketRecord> records,
                            std::int64_t start_time,
                            std::int64_t end_time,
                            std::int64_t interval_seconds,
                            Metric metric) {
    check_window(start_time, end_time, interval_seconds);
    RawSeries out;
    out.start_time = start_time;
    out.interval_seconds = interval_seconds;
    out.metric = metric;
    out.values.assign(bin_count(start_time, end_time, interval_seconds), 0.0);

    for (const PacketRecord& r : records) {
        const auto ts = static_cast<std::int64_t>(r.ts_sec);
        if (ts < start_time || ts >= end_time) continue;
        // bin edges fall on whole seconds, so the microsecond part can
        // never move a record across an edge
        const std::int64_t k = (ts - start_time) / interval_seconds;
        out.values[static_cast<std::size_t>(k)] += metric_value(r, metric);
    }
    return out;
}

RawSeries bin_events(std::span<const PacketRecord> records,
                     std::int64_t start_time,
                     std::int64_t end_time,
                     std::int64_t interval_seconds,
                     Metric metric) {
#ifdef _OPENMP
    check_window(start_time, end_time, interval_seconds);
    const std::int64_t nbins = bin_count(start_time, end_time, interval_seconds);
    const std::int64_t n = static_cast<std::int64_t>(records.size());

    const int nthreads = omp_get_max_threads();
    if (nthreads <= 1 || n < 4096) {
        return bin_events_serial(records, start_time, end_time, interval_seconds,
                                 metric);
    }

    RawSeries out;
    out.start_time = start_time;
    out.interval_seconds = interval_seconds;
    out.metric = metric;
    out.values.assign(static_cast<std::size_t>(nbins), 0.0);

    // per-thread partial histograms merged in thread order; all metric
    // contributions are integers, so the merged sums are exact
    std::vector<std::vector<double>> partial(
        static_cast<std::size_t>(nthreads),
        std::vector<double>(static_cast<std::size_t>(nbins), 0.0));

#pragma omp parallel
    {
        std::vector<double>& local =
            partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t idx = 0; idx < n; ++idx) {
            const PacketRecord& r = records[static_cast<std::size_t>(idx)];
            const auto ts = static_cast<std::int64_t>(r.ts_sec);
            if (ts < start_time || ts >= end_time) continue;
            const std::int64_t k = (ts - start_time) / interval_seconds;
            local[static_cast<std::size_t>(k)] += metric_value(r, metric);
        }
    }
    for (const auto& local : partial) {
        for (std::int64_t k = 0; k < nbins; ++k) {
            out.values[static_cast<std::size_t>(k)] += local[static_cast<std::size_t>(k)];
        }
    }
    return out;
#else
    return bin_events_serial(records, start_time, end_time, interval_seconds, metric);
#endif
}

Scaler fit_scaler(const RawSeries& raw) {
    if (raw.values.empty()) {
        throw std::invalid_argument("fit_scaler: empty series");
    }
    const auto [lo, hi] = std::minmax_element(raw.values.begin(), raw.values.end());
    if (*lo == *hi) {
        throw std::runtime_error("degenerate series: zero range");
    }
    return Scaler{*lo, *hi};
}

TimeSeries apply_scaler(const Scaler& scaler, const RawSeries& raw) {
    if (!(scaler.train_max > scaler.train_min)) {
        throw std::invalid_argument("apply_scaler: invalid scaler range");
    }
    TimeSeries out;
    out.start_time = raw.start_time;
    out.interval_seconds = raw.interval_seconds;
    out.scaler = scaler;
    out.values.reserve(raw.values.size());
    const double range = scaler.train_max - scaler.train_min;
    for (double v : raw.values) {
        const double scaled = (v - scaler.train_min) / range;
        out.values.push_back(std::clamp(scaled, 0.0, 1.0));
    }
    return out;
}

} // namespace lstmad
