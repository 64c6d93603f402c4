#include "lstmad/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "lstmad/checkpoint.hpp"
#include "lstmad/detector.hpp"
#include "lstmad/pcap.hpp"
#include "lstmad/predictor.hpp"
#include "lstmad/series_csv.hpp"

namespace fs = std::filesystem;

namespace lstmad {

namespace artifact {
std::string weights_json(int horizons) {
    return "weights_L" + std::to_string(horizons) + ".json";
}
std::string losses_csv(int horizons) {
    return "losses_L" + std::to_string(horizons) + ".csv";
}
std::string errors_valid_csv(int horizons) {
    return "errors_valid_L" + std::to_string(horizons) + ".csv";
}
std::string errors_test_csv(int horizons) {
    return "errors_test_L" + std::to_string(horizons) + ".csv";
}
std::string report_json(int horizons) {
    return "report_L" + std::to_string(horizons) + ".json";
}
std::string report_txt(int horizons) {
    return "report_L" + std::to_string(horizons) + ".txt";
}
} // namespace artifact

std::string read_file_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    const std::string text = read_file_text(path);
    return std::vector<std::uint8_t>(text.begin(), text.end());
}

void atomic_write_file(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write file: " + tmp.string());
        }
        out << contents;
        if (!out.good()) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

namespace {

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad numeric value for " + key + ": " + v);
    }
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer value for " + key + ": " + v);
    }
}

std::vector<int> parse_horizons(const std::string& v) {
    if (v == "all") return {1, 2, 3};
    std::vector<int> set;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t end = v.find(',', pos);
        if (end == std::string::npos) end = v.size();
        const std::string item = v.substr(pos, end - pos);
        const std::int64_t L = parse_int(item, "horizons");
        if (L < 1 || L > 3) {
            throw std::invalid_argument("horizons must be 1, 2, 3 or all");
        }
        if (std::find(set.begin(), set.end(), static_cast<int>(L)) == set.end()) {
            set.push_back(static_cast<int>(L));
        }
        pos = end + 1;
        if (end == v.size()) break;
    }
    if (set.empty()) throw std::invalid_argument("horizons list is empty");
    return set;
}

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

TrainConfig RunConfig::train_config(int horizons) const {
    TrainConfig tc;
    tc.hidden_size = hidden_size;
    tc.horizons = horizons;
    tc.learning_rate = learning_rate;
    tc.epochs = epochs;
    tc.momentum = momentum;
    tc.batch_size = batch_size;
    tc.bptt_window = bptt_window;
    tc.seed = seed;
    tc.init_scale = init_scale;
    return tc;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "input") {
        input = value;
    } else if (key == "outdir") {
        outdir = value;
    } else if (key == "label") {
        label = value;
    } else if (key == "metric") {
        metric = metric_from_name(value);
    } else if (key == "interval_seconds") {
        interval_seconds = parse_int(value, key);
    } else if (key == "start_time") {
        start_time = parse_int(value, key);
    } else if (key == "end_time") {
        end_time = parse_int(value, key);
    } else if (key == "split_train") {
        split.train = parse_double(value, key);
    } else if (key == "split_valid") {
        split.valid = parse_double(value, key);
    } else if (key == "split_test") {
        split.test = parse_double(value, key);
    } else if (key == "horizons") {
        horizon_set = parse_horizons(value);
    } else if (key == "hidden_size") {
        hidden_size = static_cast<int>(parse_int(value, key));
    } else if (key == "learning_rate") {
        learning_rate = parse_double(value, key);
    } else if (key == "epochs") {
        epochs = static_cast<int>(parse_int(value, key));
    } else if (key == "momentum") {
        momentum = parse_double(value, key);
    } else if (key == "batch_size") {
        batch_size = static_cast<int>(parse_int(value, key));
    } else if (key == "bptt_window") {
        bptt_window = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(parse_int(value, key));
        if (!synth_seed_set) synth.seed = seed;
    } else if (key == "init_scale") {
        init_scale = parse_double(value, key);
    } else if (key == "grid_min") {
        grid_min = parse_double(value, key);
    } else if (key == "grid_max") {
        grid_max = parse_double(value, key);
    } else if (key == "grid_step") {
        grid_step = parse_double(value, key);
    } else if (key == "q") {
        q = parse_double(value, key);
    } else if (key == "min_attack_duration_seconds") {
        min_attack_duration_seconds = parse_int(value, key);
    } else if (key == "synth_length") {
        synth.length = parse_int(value, key);
    } else if (key == "synth_mean") {
        synth.mean = parse_double(value, key);
    } else if (key == "synth_amplitude") {
        synth.amplitude = parse_double(value, key);
    } else if (key == "synth_period") {
        synth.period = parse_int(value, key);
    } else if (key == "synth_noise_sigma") {
        synth.noise_sigma = parse_double(value, key);
    } else if (key == "synth_bursts") {
        synth.bursts = parse_bursts(value);
    } else if (key == "synth_seed") {
        synth.seed = static_cast<std::uint64_t>(parse_int(value, key));
        synth_seed_set = true;
    } else if (key == "synth_start_time") {
        synth.start_time = parse_int(value, key);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

RunConfig RunConfig::from_file(const fs::path& path) {
    RunConfig cfg;
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path.string());
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("bad config line " + std::to_string(lineno) +
                                        ": " + t);
        }
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::validate() const {
    if (interval_seconds <= 0) {
        throw std::invalid_argument("interval_seconds must be positive");
    }
    if (horizon_set.empty()) throw std::invalid_argument("no horizons selected");
    train_config(horizon_set.front()).validate();
    make_pet_grid(grid_min, grid_max, grid_step);
    if (!(q > 0.0) || q > 1.0) {
        throw std::invalid_argument("q must be in (0, 1]");
    }
    if (min_attack_duration_seconds <= 0) {
        throw std::invalid_argument("min_attack_duration_seconds must be positive");
    }
    const double sum = split.train + split.valid + split.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split fractions must sum to 1");
    }
    synth.validate();
}

namespace {

fs::path require_artifact(const fs::path& outdir, const std::string& name) {
    const fs::path p = outdir / name;
    if (!fs::exists(p)) {
        throw MissingArtifactError(name);
    }
    return p;
}

TimeSeries load_scaled_series(const fs::path& path, const Scaler& scaler) {
    const SeriesCsv csv = load_series_csv(read_file_text(path));
    TimeSeries ts;
    ts.start_time = csv.start_time;
    ts.interval_seconds = csv.interval_seconds;
    ts.values = csv.values;
    ts.scaler = scaler;
    for (double v : ts.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::runtime_error("series not unit-scaled: " + path.string());
        }
    }
    return ts;
}

Scaler load_scaler(const fs::path& path) {
    const nlohmann::json doc = nlohmann::json::parse(read_file_text(path));
    return Scaler{doc.at("train_min").get<double>(),
                  doc.at("train_max").get<double>()};
}

void stage_synth(const RunConfig& cfg) {
    const LabeledSeries labeled = generate(cfg.synth);
    fs::create_directories(cfg.outdir);
    atomic_write_file(cfg.outdir / artifact::synth_csv,
                      write_series_csv(labeled.series.start_time,
                                       labeled.series.interval_seconds,
                                       labeled.series.values));
    atomic_write_file(cfg.outdir / artifact::labels_csv,
                      write_labels_csv(labeled.labels));
}

void stage_ingest(const RunConfig& cfg) {
    fs::path input = cfg.input;
    if (input.empty()) {
        // default to the synthetic series produced in the output directory
        input = require_artifact(cfg.outdir, artifact::synth_csv);
    }
    if (!fs::exists(input)) {
        throw MissingArtifactError(input.string());
    }

    LabeledSeries labeled;
    const std::string ext = input.extension().string();
    if (ext == ".pcap" || ext == ".cap") {
        const std::vector<PacketRecord> records = parse_pcap_file(input.string());
        if (records.empty()) {
            throw std::runtime_error("capture holds no records: " + input.string());
        }
        std::int64_t lo = cfg.start_time;
        std::int64_t hi = cfg.end_time;
        if (lo < 0) {
            lo = std::min_element(records.begin(), records.end(),
                                  [](const PacketRecord& a, const PacketRecord& b) {
                                      return a.ts_sec < b.ts_sec;
                                  })
                     ->ts_sec;
        }
        if (hi < 0) {
            hi = std::max_element(records.begin(), records.end(),
                                  [](const PacketRecord& a, const PacketRecord& b) {
                                      return a.ts_sec < b.ts_sec;
                                  })
                     ->ts_sec +
                 1;
        }
        labeled.series =
            bin_events(records, lo, hi, cfg.interval_seconds, cfg.metric);
        labeled.labels.assign(labeled.series.values.size(), 0);
    } else {
        const SeriesCsv csv = load_series_csv(read_file_text(input));
        labeled.series.start_time = csv.start_time;
        labeled.series.interval_seconds = csv.interval_seconds;
        labeled.series.values = csv.values;
        labeled.series.metric = cfg.metric;
        for (double v : labeled.series.values) {
            if (!std::isfinite(v) || v < 0.0) {
                throw std::runtime_error(
                    "series values must be non-negative finite counts: " +
                    input.string());
            }
        }
        labeled.labels.assign(labeled.series.values.size(), 0);
        // pick up attack labels generated next to a synthetic input
        const fs::path labels_path = input.parent_path() / artifact::labels_csv;
        if (fs::exists(labels_path)) {
            std::vector<char> labels = load_labels_csv(read_file_text(labels_path));
            if (labels.size() == labeled.labels.size()) {
                labeled.labels = std::move(labels);
            }
        }
    }

    fs::create_directories(cfg.outdir);
    atomic_write_file(cfg.outdir / artifact::binned_csv,
                      write_series_csv(labeled.series.start_time,
                                       labeled.series.interval_seconds,
                                       labeled.series.values));

    const SplitSeries parts = split(labeled, cfg.split);
    const Scaler scaler = fit_scaler(parts.train.series);

    nlohmann::json scaler_doc = {{"train_min", scaler.train_min},
                                 {"train_max", scaler.train_max}};
    atomic_write_file(cfg.outdir / artifact::scaler_json, scaler_doc.dump(2) + "\n");

    const auto write_scaled = [&](const RawSeries& raw, const char* name) {
        const TimeSeries ts = apply_scaler(scaler, raw);
        atomic_write_file(cfg.outdir / name,
                          write_series_csv(ts.start_time, ts.interval_seconds,
                                           ts.values));
    };
    write_scaled(parts.train.series, artifact::train_csv);
    write_scaled(parts.valid.series, artifact::valid_csv);
    write_scaled(parts.test.series, artifact::test_csv);
}

void stage_train(const RunConfig& cfg) {
    const fs::path train_path = require_artifact(cfg.outdir, artifact::train_csv);
    const Scaler scaler =
        load_scaler(require_artifact(cfg.outdir, artifact::scaler_json));
    const TimeSeries series = load_scaled_series(train_path, scaler);

    std::vector<TrainConfig> configs;
    configs.reserve(cfg.horizon_set.size());
    for (int L : cfg.horizon_set) {
        configs.push_back(cfg.train_config(L));
    }
    const std::vector<TrainResult> results = train_many(series, configs);

    for (std::size_t i = 0; i < configs.size(); ++i) {
        const int L = configs[i].horizons;
        atomic_write_file(cfg.outdir / artifact::weights_json(L),
                          weights_to_json(results[i].weights, configs[i]));
        std::string csv = "epoch,loss\n";
        char buf[64];
        for (std::size_t e = 0; e < results[i].loss_curve.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", e + 1,
                          results[i].loss_curve[e]);
            csv += buf;
        }
        atomic_write_file(cfg.outdir / artifact::losses_csv(L), csv);
    }
}

void stage_calibrate(const RunConfig& cfg) {
    const fs::path valid_path = require_artifact(cfg.outdir, artifact::valid_csv);
    const Scaler scaler =
        load_scaler(require_artifact(cfg.outdir, artifact::scaler_json));
    const TimeSeries series = load_scaled_series(valid_path, scaler);

    const std::vector<double> grid =
        make_pet_grid(cfg.grid_min, cfg.grid_max, cfg.grid_step);
    const int cr = choose_cr(series.interval_seconds,
                             cfg.min_attack_duration_seconds);

    nlohmann::json models = nlohmann::json::array();
    for (int L : cfg.horizon_set) {
        const fs::path wpath =
            require_artifact(cfg.outdir, artifact::weights_json(L));
        const Checkpoint cp = weights_from_json(read_file_text(wpath));
        const HorizonPredictions preds = predict_series(cp.weights, series);
        const ErrorSeries errors = point_errors(preds, series);
        atomic_write_file(cfg.outdir / artifact::errors_valid_csv(L),
                          write_error_csv(errors));
        const double pet = calibrate_pet(errors, grid, cfg.q);
        models.push_back({{"horizons", L},
                          {"pet", pet},
                          {"errors_csv", artifact::errors_valid_csv(L)}});
    }

    nlohmann::json doc = {{"format", "lstmad-thresholds-v1"},
                          {"q", cfg.q},
                          {"cr", cr},
                          {"grid", grid},
                          {"models", models}};
    atomic_write_file(cfg.outdir / artifact::thresholds_json, doc.dump(2) + "\n");
}

Thresholds thresholds_for(const nlohmann::json& doc, int horizons) {
    Thresholds th;
    th.cr = doc.at("cr").get<int>();
    th.grid = doc.at("grid").get<std::vector<double>>();
    th.target_fraction = doc.at("q").get<double>();
    for (const nlohmann::json& m : doc.at("models")) {
        if (m.at("horizons").get<int>() == horizons) {
            th.pet = m.at("pet").get<double>();
            return th;
        }
    }
    throw MissingArtifactError("thresholds for L" + std::to_string(horizons));
}

void stage_detect(const RunConfig& cfg) {
    const fs::path test_path = require_artifact(cfg.outdir, artifact::test_csv);
    const Scaler scaler =
        load_scaler(require_artifact(cfg.outdir, artifact::scaler_json));
    const TimeSeries series = load_scaled_series(test_path, scaler);
    const nlohmann::json thresholds_doc = nlohmann::json::parse(
        read_file_text(require_artifact(cfg.outdir, artifact::thresholds_json)));

    for (int L : cfg.horizon_set) {
        const fs::path wpath =
            require_artifact(cfg.outdir, artifact::weights_json(L));
        const Checkpoint cp = weights_from_json(read_file_text(wpath));
        const Thresholds th = thresholds_for(thresholds_doc, L);

        const HorizonPredictions preds = predict_series(cp.weights, series);
        const ErrorSeries errors = point_errors(preds, series);
        const std::string errors_name = artifact::errors_test_csv(L);
        atomic_write_file(cfg.outdir / errors_name, write_error_csv(errors));

        std::vector<AnomalyRegion> regions = extract_regions(errors, th);
        const AnomalyReport report =
            build_report(std::move(regions), errors.size(), th, cfg.label);
        atomic_write_file(cfg.outdir / artifact::report_json(L),
                          report_to_json(report, errors_name));
        atomic_write_file(cfg.outdir / artifact::report_txt(L),
                          render_report_text(report));
    }
}

void stage_report(const RunConfig& cfg) {
    for (int L : cfg.horizon_set) {
        const fs::path p = require_artifact(cfg.outdir, artifact::report_txt(L));
        std::cout << L << "-step ahead\n" << read_file_text(p) << "\n";
    }
}

} // namespace

int run_pipeline(const RunConfig& config, const std::set<Stage>& stages) {
    config.validate();
    // pipeline order regardless of how the set was assembled
    for (Stage s : {Stage::synth, Stage::ingest, Stage::train, Stage::calibrate,
                    Stage::detect, Stage::report}) {
        if (stages.count(s) == 0) continue;
        switch (s) {
        case Stage::synth:
            stage_synth(config);
            break;
        case Stage::ingest:
            stage_ingest(config);
            break;
        case Stage::train:
            stage_train(config);
            break;
        case Stage::calibrate:
            stage_calibrate(config);
            break;
        case Stage::detect:
            stage_detect(config);
            break;
        case Stage::report:
            stage_report(config);
            break;
        }
    }
    return 0;
}

} // namespace lstmad
