#include "lstmad/predictor.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lstmad/detector.hpp"

namespace lstmad {

std::vector<TrainingPair> make_training_pairs(const TimeSeries& series,
                                              int horizons) {
    const std::int64_t n = static_cast<std::int64_t>(series.values.size());
    if (horizons < 1) {
        throw std::invalid_argument("make_training_pairs: horizons must be >= 1");
    }
    if (n <= horizons) {
        throw std::invalid_argument("make_training_pairs: series too short");
    }
    std::vector<TrainingPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n - horizons));
    for (std::int64_t t = 0; t + horizons < n; ++t) {
        TrainingPair p;
        p.input = series.values[static_cast<std::size_t>(t)];
        p.targets.assign(series.values.begin() + t + 1,
                         series.values.begin() + t + 1 + horizons);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

HorizonPredictions predict_series(const LstmWeights& weights,
                                  const TimeSeries& series) {
    const std::int64_t n = static_cast<std::int64_t>(series.values.size());
    HorizonPredictions preds;
    preds.horizons = weights.horizons;
    preds.length = n;
    preds.values.resize(static_cast<std::size_t>(n) * weights.horizons);

    LstmState state = LstmState::zeros(weights.hidden);
    for (std::int64_t t = 0; t < n; ++t) {
        StepResult step =
            forward_step(weights, state, series.values[static_cast<std::size_t>(t)]);
        state = std::move(step.state);
        for (int k = 0; k < weights.horizons; ++k) {
            if (!std::isfinite(step.output[k])) {
                throw std::runtime_error("inference overflow");
            }
            preds.values[static_cast<std::size_t>(t) * weights.horizons + k] =
                step.output[k];
        }
    }
    return preds;
}

namespace {

// All predictions aiming at step s were made at steps s-1 .. s-L.
inline void gather_step(const HorizonPredictions& preds, const TimeSeries& series,
                        std::int64_t s, double& error_out, int& count_out) {
    const int L = preds.horizons;
    const double x = series.values[static_cast<std::size_t>(s)];
    double sum = 0.0;
    int count = 0;
    for (int k = 1; k <= L; ++k) {
        const std::int64_t t = s - k;
        if (t < 0) break;
        sum += relative_error(x, preds.at(t, k - 1));
        ++count;
    }
    error_out = count > 0 ? sum / count : 0.0;
    count_out = count;
}

} // namespace

ErrorSeries point_errors_serial(const HorizonPredictions& preds,
                                const TimeSeries& series) {
    const std::int64_t n = static_cast<std::int64_t>(series.values.size());
    if (preds.length != n) {
        throw std::invalid_argument("point_errors: prediction/series length mismatch");
    }
    ErrorSeries out;
    out.errors.resize(static_cast<std::size_t>(n));
    out.contributing_count.resize(static_cast<std::size_t>(n));
    for (std::int64_t s = 0; s < n; ++s) {
        gather_step(preds, series, s, out.errors[static_cast<std::size_t>(s)],
                    out.contributing_count[static_cast<std::size_t>(s)]);
    }
    return out;
}

ErrorSeries point_errors(const HorizonPredictions& preds,
                         const TimeSeries& series) {
    const std::int64_t n = static_cast<std::int64_t>(series.values.size());
    if (preds.length != n) {
        throw std::invalid_argument("point_errors: prediction/series length mismatch");
    }
    ErrorSeries out;
    out.errors.resize(static_cast<std::size_t>(n));
    out.contributing_count.resize(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t s = 0; s < n; ++s) {
        gather_step(preds, series, s, out.errors[static_cast<std::size_t>(s)],
                    out.contributing_count[static_cast<std::size_t>(s)]);
    }
    return out;
}

std::string write_error_csv(const ErrorSeries& errors) {
    std::string out = "index,error,count\n";
    char buf[64];
    for (std::size_t i = 0; i < errors.errors.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.12g,%d\n", i, errors.errors[i],
                      errors.contributing_count[i]);
        out += buf;
    }
    return out;
}

ErrorSeries load_error_csv(std::string_view text) {
    ErrorSeries out;
    std::size_t pos = text.find('\n');
    std::string_view header = text.substr(0, pos);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != "index,error,count") {
        throw std::runtime_error("bad header");
    }
    std::string_view rest = pos == std::string_view::npos ? std::string_view{}
                                                          : text.substr(pos + 1);
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
        const std::size_t c2 = c1 == std::string_view::npos
                                   ? std::string_view::npos
                                   : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
            throw std::runtime_error("bad row: " + std::string(line));
        }
        std::int64_t index = 0;
        auto r1 = std::from_chars(line.data(), line.data() + c1, index);
        double err = 0.0;
        auto r2 = std::from_chars(line.data() + c1 + 1, line.data() + c2, err);
        int count = 0;
        auto r3 = std::from_chars(line.data() + c2 + 1, line.data() + line.size(), count);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r3.ec != std::errc()) {
            throw std::runtime_error("bad row: " + std::string(line));
        }
        if (index != expected) {
            throw std::runtime_error("non-contiguous series");
        }
        out.errors.push_back(err);
        out.contributing_count.push_back(count);
        ++expected;
    }
    return out;
}

} // namespace lstmad
