#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lstmad/lstm.hpp"
#include "lstmad/timeseries.hpp"

namespace lstmad {

/// Multi-horizon predictions: values[t*L + k] is the prediction of step
/// t+k+1 made at step t. Entries aiming past the series end are absent.
struct HorizonPredictions {
    int horizons = 0;        // L
    std::int64_t length = 0; // n
    std::vector<double> values;

    bool present(std::int64_t t, int k) const {
        return t + static_cast<std::int64_t>(k) + 1 < length;
    }
    double at(std::int64_t t, int k) const {
        return values[static_cast<std::size_t>(t) * horizons + k];
    }
};

/// Per-step aggregated prediction error and how many horizon predictions
/// contributed to each step (0 only at the series start).
struct ErrorSeries {
    std::vector<double> errors;
    std::vector<int> contributing_count;

    std::int64_t size() const { return static_cast<std::int64_t>(errors.size()); }
};

/// (x_t, [x_{t+1} .. x_{t+L}]) for every t that has L successors.
std::vector<TrainingPair> make_training_pairs(const TimeSeries& series,
                                              int horizons);

/// Stateful left-to-right pass from the zero state, recording the L
/// outputs at each step as predictions of the next L steps.
HorizonPredictions predict_series(const LstmWeights& weights,
                                  const TimeSeries& series);

/// Aggregate, for each step, the absolute errors of every prediction
/// that targeted it (mean over the available horizons).
ErrorSeries point_errors(const HorizonPredictions& preds,
                         const TimeSeries& series);

/// Single-threaded reference for point_errors; bit-identical results.
ErrorSeries point_errors_serial(const HorizonPredictions& preds,
                                const TimeSeries& series);

/// CSV with header `index,error,count`.
std::string write_error_csv(const ErrorSeries& errors);
ErrorSeries load_error_csv(std::string_view text);

} // namespace lstmad
