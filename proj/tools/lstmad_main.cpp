#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include "CLI11.hpp"

#include "lstmad/pipeline.hpp"

namespace {

// Collects flag overrides in the order given so they can be replayed on
// top of the config file.
struct FlagOverrides {
    std::vector<std::pair<std::string, std::string>> pairs;

    void add(CLI::App* cmd, const std::string& flag, const std::string& key,
             const std::string& help) {
        cmd->add_option_function<std::string>(
               flag,
               [this, key](const std::string& v) { pairs.emplace_back(key, v); },
               help)
            ->expected(1);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM-based collective anomaly detection for traffic time series"};
    app.require_subcommand(1);

    std::string config_path;
    FlagOverrides overrides;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "flat key=value run configuration");
        overrides.add(cmd, "--input", "input", "capture (.pcap) or series CSV");
        overrides.add(cmd, "--outdir", "outdir", "artifact directory");
        overrides.add(cmd, "--label", "label", "dataset label used in reports");
        overrides.add(cmd, "--seed", "seed", "RNG seed");
        overrides.add(cmd, "--horizons", "horizons", "output sizes: 1, 2, 3 or all");
        overrides.add(cmd, "--interval", "interval_seconds", "bin duration in seconds");
        overrides.add(cmd, "--metric", "metric", "packets, bytes or tcp_syn");
        overrides.add(cmd, "--epochs", "epochs", "training epochs");
        overrides.add(cmd, "--grid-min", "grid_min", "smallest PET candidate");
        overrides.add(cmd, "--grid-max", "grid_max", "largest PET candidate");
        overrides.add(cmd, "--grid-step", "grid_step", "PET grid spacing");
        overrides.add(cmd, "--q", "q", "fraction of validation steps kept normal");
        overrides.add(cmd, "--min-attack-duration", "min_attack_duration_seconds",
                      "shortest attack worth flagging, seconds");
        return cmd;
    };

    std::map<std::string, lstmad::Stage> stage_of = {
        {"ingest", lstmad::Stage::ingest},     {"synth", lstmad::Stage::synth},
        {"train", lstmad::Stage::train},       {"calibrate", lstmad::Stage::calibrate},
        {"detect", lstmad::Stage::detect},     {"report", lstmad::Stage::report},
    };
    add_common(app.add_subcommand("ingest", "bin a capture or CSV and write scaled splits"));
    add_common(app.add_subcommand("synth", "generate a labeled synthetic series"));
    add_common(app.add_subcommand("train", "train LSTM predictors on the train split"));
    add_common(app.add_subcommand("calibrate", "choose PET and CR on the valid split"));
    add_common(app.add_subcommand("detect", "score the test split and extract regions"));
    add_common(app.add_subcommand("report", "print the stored detection reports"));

    CLI11_PARSE(app, argc, argv);

    try {
        lstmad::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = lstmad::RunConfig::from_file(config_path);
        }
        for (const auto& [key, value] : overrides.pairs) {
            cfg.set(key, value);
        }
        std::set<lstmad::Stage> stages;
        for (const CLI::App* sub : app.get_subcommands()) {
            stages.insert(stage_of.at(sub->get_name()));
        }
        return lstmad::run_pipeline(cfg, stages);
    } catch (const lstmad::MissingArtifactError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
