#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lstmad/predictor.hpp"

namespace lstmad {

/// Calibrated detection thresholds: the error cutoff (pet) with the grid
/// it was chosen from, and the minimum run length (cr).
struct Thresholds {
    double pet = 0.3;
    int cr = 4;
    std::vector<double> grid;
    double target_fraction = 1.0; // q
};

/// Inclusive step range of one collective anomaly.
struct AnomalyRegion {
    std::int64_t start = 0;
    std::int64_t end = 0;

    std::int64_t length() const { return end - start + 1; }
};

struct AnomalyReport {
    std::vector<AnomalyRegion> regions;
    std::int64_t total_steps = 0;
    double anomaly_ratio = 0.0; // covered steps / total steps, exact
    Thresholds thresholds;
    std::string label;
};

/// Per-step, per-horizon error of Eq. RE(x, x_hat) = |x - x_hat|.
double relative_error(double x, double x_hat);

/// Ascending candidate cutoffs lo, lo+step, ..., hi.
std::vector<double> make_pet_grid(double lo = 0.05, double hi = 1.0,
                                  double step = 0.05);

/// Smallest grid value p such that at least a q-fraction of validation
/// steps have error <= p. Throws
/// "calibration failed: validation errors exceed grid maximum".
double calibrate_pet(const ErrorSeries& validation_errors,
                     const std::vector<double>& grid, double q);

/// Single-threaded reference for calibrate_pet; identical result.
double calibrate_pet_serial(const ErrorSeries& validation_errors,
                            const std::vector<double>& grid, double q);

/// ceil(min_attack_duration / interval).
int choose_cr(std::int64_t interval_seconds,
              std::int64_t min_attack_duration_seconds);

/// Maximal runs of consecutive steps with error strictly above pet,
/// keeping only runs of length >= cr.
std::vector<AnomalyRegion> extract_regions(const ErrorSeries& errors,
                                           const Thresholds& thresholds);

/// Assemble the report; validates that regions are sorted, disjoint and
/// inside [0, total_steps).
AnomalyReport build_report(std::vector<AnomalyRegion> regions,
                           std::int64_t total_steps,
                           Thresholds thresholds,
                           std::string label);

/// Ratio as a percentage rounded to two decimals, e.g. "1.67%".
std::string format_ratio_percent(double ratio);

/// Plain-text rendering: one line per region plus the ratio.
std::string render_report_text(const AnomalyReport& report);

/// JSON document with label, total_steps, pet, cr, regions and the
/// two-decimal percentage.
std::string report_to_json(const AnomalyReport& report,
                           const std::string& per_step_errors_path);

} // namespace lstmad
