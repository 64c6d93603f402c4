#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lstmad {

/// Contents of a series CSV: header `index,timestamp,value`, rows with
/// contiguous indices from 0. The interval is recovered from the first
/// timestamp gap (600 s when the file has a single row).
struct SeriesCsv {
    std::int64_t start_time = 0;
    std::int64_t interval_seconds = 600;
    std::vector<double> values;
};

SeriesCsv load_series_csv(std::string_view text);

std::string write_series_csv(std::int64_t start_time,
                             std::int64_t interval_seconds,
                             std::span<const double> values);

} // namespace lstmad
