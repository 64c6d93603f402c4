#include "lstmad/checkpoint.hpp"

#include <stdexcept>

#include "json.hpp"

namespace lstmad {

namespace {

constexpr const char* kFormat = "lstmad-checkpoint-v1";

nlohmann::json gate_to_json(const GateParams& g) {
    return {{"w_x", g.w_x}, {"u_h", g.u_h}, {"b", g.b}};
}

GateParams gate_from_json(const nlohmann::json& j, std::size_t hidden) {
    GateParams g;
    g.w_x = j.at("w_x").get<std::vector<double>>();
    g.u_h = j.at("u_h").get<std::vector<double>>();
    g.b = j.at("b").get<std::vector<double>>();
    if (g.w_x.size() != hidden || g.b.size() != hidden ||
        g.u_h.size() != hidden * hidden) {
        throw std::runtime_error("checkpoint: gate shape mismatch");
    }
    return g;
}

} // namespace

std::string weights_to_json(const LstmWeights& weights, const TrainConfig& config) {
    nlohmann::json doc = {
        {"format", kFormat},
        {"hidden", weights.hidden},
        {"horizons", weights.horizons},
        {"seed", config.seed},
        {"config",
         {{"hidden_size", config.hidden_size},
          {"horizons", config.horizons},
          {"learning_rate", config.learning_rate},
          {"epochs", config.epochs},
          {"momentum", config.momentum},
          {"batch_size", config.batch_size},
          {"bptt_window", config.bptt_window},
          {"seed", config.seed},
          {"init_scale", config.init_scale}}},
        {"weights",
         {{"input_gate", gate_to_json(weights.input_gate)},
          {"forget_gate", gate_to_json(weights.forget_gate)},
          {"output_gate", gate_to_json(weights.output_gate)},
          {"candidate", gate_to_json(weights.candidate)},
          {"output", {{"w", weights.out_w}, {"b", weights.out_b}}}}},
    };
    return doc.dump(2) + "\n";
}

Checkpoint weights_from_json(std::string_view text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) {
        throw std::runtime_error("checkpoint: unknown format");
    }
    Checkpoint cp;
    const int hidden = doc.at("hidden").get<int>();
    const int horizons = doc.at("horizons").get<int>();
    cp.weights = LstmWeights::zeros(hidden, horizons);

    const nlohmann::json& c = doc.at("config");
    cp.config.hidden_size = c.at("hidden_size").get<int>();
    cp.config.horizons = c.at("horizons").get<int>();
    cp.config.learning_rate = c.at("learning_rate").get<double>();
    cp.config.epochs = c.at("epochs").get<int>();
    cp.config.momentum = c.at("momentum").get<double>();
    cp.config.batch_size = c.at("batch_size").get<int>();
    cp.config.bptt_window = c.at("bptt_window").get<int>();
    cp.config.seed = c.at("seed").get<std::uint64_t>();
    cp.config.init_scale = c.at("init_scale").get<double>();

    const std::size_t h = static_cast<std::size_t>(hidden);
    const nlohmann::json& w = doc.at("weights");
    cp.weights.input_gate = gate_from_json(w.at("input_gate"), h);
    cp.weights.forget_gate = gate_from_json(w.at("forget_gate"), h);
    cp.weights.output_gate = gate_from_json(w.at("output_gate"), h);
    cp.weights.candidate = gate_from_json(w.at("candidate"), h);
    cp.weights.out_w = w.at("output").at("w").get<std::vector<double>>();
    cp.weights.out_b = w.at("output").at("b").get<std::vector<double>>();
    if (cp.weights.out_w.size() != static_cast<std::size_t>(horizons) * h ||
        cp.weights.out_b.size() != static_cast<std::size_t>(horizons)) {
        throw std::runtime_error("checkpoint: output layer shape mismatch");
    }
    if (!cp.weights.all_finite()) {
        throw std::runtime_error("checkpoint: non-finite parameter");
    }
    return cp;
}

} // namespace lstmad
