#pragma once

#include <string>
#include <string_view>

#include "lstmad/lstm.hpp"

namespace lstmad {

/// Self-describing JSON checkpoint: sizes, seed, config echo and every
/// parameter array as decimal floats that round-trip exactly.
std::string weights_to_json(const LstmWeights& weights, const TrainConfig& config);

struct Checkpoint {
    LstmWeights weights;
    TrainConfig config;
};

Checkpoint weights_from_json(std::string_view text);

} // namespace lstmad
