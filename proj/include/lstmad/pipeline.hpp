#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lstmad/lstm.hpp"
#include "lstmad/synth.hpp"
#include "lstmad/timeseries.hpp"

namespace lstmad {

enum class Stage { ingest, synth, train, calibrate, detect, report };

/// A required upstream artifact is not on disk; the CLI maps this to
/// exit status 2.
struct MissingArtifactError : std::runtime_error {
    explicit MissingArtifactError(const std::string& name)
        : std::runtime_error("missing artifact " + name) {}
};

/// Declarative run configuration: flat key=value file, flag overrides on
/// top. Unknown keys are rejected.
struct RunConfig {
    std::filesystem::path input;  // capture (.pcap/.cap) or series CSV
    std::filesystem::path outdir = ".";
    std::string label = "test";

    Metric metric = Metric::packets;
    std::int64_t interval_seconds = 600;
    // window [start_time, end_time); negative means derive from the data
    std::int64_t start_time = -1;
    std::int64_t end_time = -1;

    SplitFractions split;

    // training (horizon_set lists the output sizes to train)
    std::vector<int> horizon_set = {3};
    int hidden_size = 10;
    double learning_rate = 1e-4;
    int epochs = 100;
    double momentum = 0.5;
    int batch_size = 1;
    int bptt_window = 16;
    std::uint64_t seed = 42;
    double init_scale = 0.1;

    // calibration
    double grid_min = 0.05;
    double grid_max = 1.0;
    double grid_step = 0.05;
    double q = 1.0;
    std::int64_t min_attack_duration_seconds = 2400;

    // synthetic generator; synth.seed follows `seed` unless synth_seed
    // was set explicitly
    SynthConfig synth;
    bool synth_seed_set = false;

    TrainConfig train_config(int horizons) const;

    static RunConfig from_file(const std::filesystem::path& path);
    /// Apply one key=value pair; throws std::invalid_argument on unknown
    /// keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    void validate() const;
};

/// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* binned_csv = "binned.csv";
inline constexpr const char* scaler_json = "scaler.json";
inline constexpr const char* train_csv = "series_train.csv";
inline constexpr const char* valid_csv = "series_valid.csv";
inline constexpr const char* test_csv = "series_test.csv";
inline constexpr const char* synth_csv = "synth.csv";
inline constexpr const char* labels_csv = "labels.csv";
inline constexpr const char* thresholds_json = "thresholds.json";

std::string weights_json(int horizons);
std::string losses_csv(int horizons);
std::string errors_valid_csv(int horizons);
std::string errors_test_csv(int horizons);
std::string report_json(int horizons);
std::string report_txt(int horizons);
} // namespace artifact

/// Run the requested stages in pipeline order. Each stage checks its
/// upstream artifacts (MissingArtifactError when absent) and writes its
/// outputs atomically. Returns 0 on success.
int run_pipeline(const RunConfig& config, const std::set<Stage>& stages);

/// Write-temp-then-rename so readers never observe a partial artifact.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_file_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

} // namespace lstmad
