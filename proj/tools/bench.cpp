// Compares the OpenMP kernels against their serial references on large
// synthetic inputs and verifies that both produce identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lstmad/detector.hpp"
#include "lstmad/predictor.hpp"
#include "lstmad/rng.hpp"
#include "lstmad/timeseries.hpp"

using namespace lstmad;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

void print_row(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-22s %10.1f ms %10.1f ms   x%-6.2f %s\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                equal ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    double scale = 1.0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--scale") == 0 && i + 1 < argc) {
            scale = std::stod(argv[++i]);
        }
    }
    const auto n_records = static_cast<std::size_t>(4'000'000 * scale);
    const auto n_steps = static_cast<std::size_t>(2'000'000 * scale);
    const int reps = 3;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial code\n");
#endif
    std::printf("%-22s %13s %13s   %-7s\n", "kernel", "serial", "parallel",
                "speedup");

    Rng rng(7);
    bool all_equal = true;

    { // event binning
        std::vector<PacketRecord> records(n_records);
        for (auto& r : records) {
            r.ts_sec = static_cast<std::uint32_t>(rng.uniform(0.0, 86400.0));
            r.ts_usec = static_cast<std::uint32_t>(rng.uniform(0.0, 1e6));
            r.original_len = static_cast<std::uint32_t>(rng.uniform(60.0, 1500.0));
            r.captured_len = r.original_len;
            r.is_tcp_syn = rng.uniform() < 0.02;
        }
        RawSeries a, b;
        const double ts = time_best_of(reps, [&] {
            a = bin_events_serial(records, 0, 86400, 600, Metric::bytes);
        });
        const double tp = time_best_of(reps, [&] {
            b = bin_events(records, 0, 86400, 600, Metric::bytes);
        });
        const bool eq = a.values == b.values;
        all_equal = all_equal && eq;
        print_row("bin_events", ts, tp, eq);
    }

    { // per-step error aggregation
        TimeSeries series;
        series.interval_seconds = 600;
        series.values.resize(n_steps);
        for (auto& v : series.values) v = rng.uniform();
        HorizonPredictions preds;
        preds.horizons = 3;
        preds.length = static_cast<std::int64_t>(n_steps);
        preds.values.resize(n_steps * 3);
        for (auto& v : preds.values) v = rng.uniform();

        ErrorSeries a, b;
        const double ts =
            time_best_of(reps, [&] { a = point_errors_serial(preds, series); });
        const double tp = time_best_of(reps, [&] { b = point_errors(preds, series); });
        const bool eq =
            a.errors == b.errors && a.contributing_count == b.contributing_count;
        all_equal = all_equal && eq;
        print_row("point_errors", ts, tp, eq);

        // PET grid calibration over the same error series
        const std::vector<double> grid = make_pet_grid();
        for (auto& e : a.errors) e = std::min(e, 0.97); // keep calibration feasible
        double pa = 0.0, pb = 0.0;
        const double cs =
            time_best_of(reps, [&] { pa = calibrate_pet_serial(a, grid, 1.0); });
        const double cp = time_best_of(reps, [&] { pb = calibrate_pet(a, grid, 1.0); });
        const bool ceq = pa == pb;
        all_equal = all_equal && ceq;
        print_row("calibrate_pet", cs, cp, ceq);
    }

    if (!all_equal) {
        std::printf("FAIL: parallel kernels disagree with serial references\n");
        return 1;
    }
    return 0;
}
