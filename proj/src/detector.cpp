#include "lstmad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace lstmad {

double relative_error(double x, double x_hat) {
    return std::abs(x - x_hat);
}

std::vector<double> make_pet_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !(step > 0.0) || hi < lo) {
        throw std::invalid_argument("make_pet_grid: invalid range");
    }
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
    grid.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        grid.push_back(lo + i * step);
    }
    return grid;
}

namespace {

void check_grid(const std::vector<double>& grid, double q) {
    if (grid.empty()) {
        throw std::invalid_argument("calibrate_pet: empty grid");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("calibrate_pet: grid must be strictly increasing");
        }
    }
    if (!(q > 0.0) || q > 1.0) {
        throw std::invalid_argument("calibrate_pet: q must be in (0, 1]");
    }
}

} // namespace

double calibrate_pet_serial(const ErrorSeries& validation_errors,
                            const std::vector<double>& grid, double q) {
    check_grid(grid, q);
    const std::int64_t n = validation_errors.size();
    if (n == 0) {
        throw std::invalid_argument("calibrate_pet: empty validation errors");
    }
    for (double p : grid) {
        std::int64_t within = 0;
        for (double e : validation_errors.errors) {
            if (e <= p) ++within;
        }
        if (static_cast<double>(within) >= q * static_cast<double>(n)) {
            return p;
        }
    }
    throw std::runtime_error(
        "calibration failed: validation errors exceed grid maximum");
}

double calibrate_pet(const ErrorSeries& validation_errors,
                     const std::vector<double>& grid, double q) {
    check_grid(grid, q);
    const std::int64_t n = validation_errors.size();
    if (n == 0) {
        throw std::invalid_argument("calibrate_pet: empty validation errors");
    }
    const int g = static_cast<int>(grid.size());
    std::vector<std::int64_t> within(grid.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < g; ++i) {
        const double p = grid[static_cast<std::size_t>(i)];
        std::int64_t count = 0;
        for (double e : validation_errors.errors) {
            if (e <= p) ++count;
        }
        within[static_cast<std::size_t>(i)] = count;
    }
    // counts are monotone in p; the smallest admissible index wins
    for (int i = 0; i < g; ++i) {
        if (static_cast<double>(within[static_cast<std::size_t>(i)]) >=
            q * static_cast<double>(n)) {
            return grid[static_cast<std::size_t>(i)];
        }
    }
    throw std::runtime_error(
        "calibration failed: validation errors exceed grid maximum");
}

int choose_cr(std::int64_t interval_seconds,
              std::int64_t min_attack_duration_seconds) {
    if (interval_seconds <= 0 || min_attack_duration_seconds <= 0) {
        throw std::invalid_argument("choose_cr: arguments must be positive");
    }
    return static_cast<int>((min_attack_duration_seconds + interval_seconds - 1) /
                            interval_seconds);
}

std::vector<AnomalyRegion> extract_regions(const ErrorSeries& errors,
                                           const Thresholds& thresholds) {
    if (thresholds.cr < 1) {
        throw std::invalid_argument("extract_regions: cr must be >= 1");
    }
    std::vector<AnomalyRegion> regions;
    const std::int64_t n = errors.size();
    std::int64_t run_start = -1;
    for (std::int64_t t = 0; t <= n; ++t) {
        const bool exceeds =
            t < n && errors.errors[static_cast<std::size_t>(t)] > thresholds.pet;
        if (exceeds && run_start < 0) {
            run_start = t;
        } else if (!exceeds && run_start >= 0) {
            if (t - run_start >= thresholds.cr) {
                regions.push_back(AnomalyRegion{run_start, t - 1});
            }
            run_start = -1;
        }
    }
    return regions;
}

AnomalyReport build_report(std::vector<AnomalyRegion> regions,
                           std::int64_t total_steps, Thresholds thresholds,
                           std::string label) {
    if (total_steps <= 0) {
        throw std::invalid_argument("build_report: total_steps must be positive");
    }
    std::int64_t covered = 0;
    std::int64_t prev_end = -1;
    for (const AnomalyRegion& r : regions) {
        if (r.start < 0 || r.end < r.start || r.end >= total_steps) {
            throw std::invalid_argument("build_report: region out of range");
        }
        if (r.start <= prev_end) {
            throw std::invalid_argument("build_report: regions overlap or are unsorted");
        }
        covered += r.length();
        prev_end = r.end;
    }
    AnomalyReport report;
    report.regions = std::move(regions);
    report.total_steps = total_steps;
    report.anomaly_ratio =
        static_cast<double>(covered) / static_cast<double>(total_steps);
    report.thresholds = std::move(thresholds);
    report.label = std::move(label);
    return report;
}

std::string format_ratio_percent(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", ratio * 100.0);
    return buf;
}

std::string render_report_text(const AnomalyReport& report) {
    std::string out;
    out += "Dataset: " + report.label + "\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "PET: %.6g  CR: %d  steps: %lld\n",
                  report.thresholds.pet, report.thresholds.cr,
                  static_cast<long long>(report.total_steps));
    out += buf;
    out += "Anomaly region    Anomaly ratio\n";
    if (report.regions.empty()) {
        out += "-                 " + format_ratio_percent(report.anomaly_ratio) + "\n";
        return out;
    }
    for (std::size_t i = 0; i < report.regions.size(); ++i) {
        const AnomalyRegion& r = report.regions[i];
        std::snprintf(buf, sizeof(buf), "%lld - %lld", static_cast<long long>(r.start),
                      static_cast<long long>(r.end));
        std::string row = buf;
        if (i == 0) {
            row.resize(std::max<std::size_t>(row.size() + 2, 18), ' ');
            row += format_ratio_percent(report.anomaly_ratio);
        }
        out += row + "\n";
    }
    return out;
}

std::string report_to_json(const AnomalyReport& report,
                           const std::string& per_step_errors_path) {
    nlohmann::json regions = nlohmann::json::array();
    for (const AnomalyRegion& r : report.regions) {
        regions.push_back({{"start", r.start}, {"end", r.end}});
    }
    // two-decimal percentage, matching the text rendering
    const double percent = std::round(report.anomaly_ratio * 10000.0) / 100.0;
    nlohmann::json doc = {
        {"label", report.label},
        {"total_steps", report.total_steps},
        {"pet", report.thresholds.pet},
        {"cr", report.thresholds.cr},
        {"regions", regions},
        {"anomaly_ratio_percent", percent},
        {"per_step_errors_path", per_step_errors_path},
    };
    return doc.dump(2) + "\n";
}

} // namespace lstmad
