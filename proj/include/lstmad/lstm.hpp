#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lstmad/timeseries.hpp"

namespace lstmad {

/// Parameters of one gate: input weights (H), recurrent matrix (H x H,
/// row-major) and bias (H).
struct GateParams {
    std::vector<double> w_x;
    std::vector<double> u_h;
    std::vector<double> b;
};

/// Full parameter set: three gates plus the candidate transform, and a
/// sigmoid output layer of `horizons` nodes reading the hidden vector.
/// The same container is reused for gradients and momentum velocity.
struct LstmWeights {
    int hidden = 0;   // H
    int horizons = 0; // L, 1..3

    GateParams input_gate;
    GateParams forget_gate;
    GateParams output_gate;
    GateParams candidate;

    std::vector<double> out_w; // L x H, row-major
    std::vector<double> out_b; // L

    static LstmWeights zeros(int hidden, int horizons);

    /// Visit every parameter array in a fixed order (gates in the order
    /// above, each w_x/u_h/b, then out_w, out_b). Initialization,
    /// updates, clipping and serialization all walk this order.
    template <typename Fn>
    void for_each_array(Fn&& fn) {
        for (GateParams* g : {&input_gate, &forget_gate, &output_gate, &candidate}) {
            fn(g->w_x);
            fn(g->u_h);
            fn(g->b);
        }
        fn(out_w);
        fn(out_b);
    }

    template <typename Fn>
    void for_each_array(Fn&& fn) const {
        for (const GateParams* g :
             {&input_gate, &forget_gate, &output_gate, &candidate}) {
            fn(g->w_x);
            fn(g->u_h);
            fn(g->b);
        }
        fn(out_w);
        fn(out_b);
    }

    bool all_finite() const;
};

using Velocity = LstmWeights;

/// Recurrent state carried across time-steps.
struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    static LstmState zeros(int hidden);
};

/// Activations retained by one forward step for backpropagation.
struct StepCache {
    double x = 0.0;
    std::vector<double> h_prev, c_prev;
    std::vector<double> gate_in, gate_forget, gate_out, cand;
    std::vector<double> c_new, tanh_c, h_new;
    std::vector<double> y;
};

struct StepResult {
    LstmState state;
    std::vector<double> output;
};

struct TrainConfig {
    int hidden_size = 10;
    int horizons = 3;
    double learning_rate = 1e-4;
    int epochs = 100;
    double momentum = 0.5;
    int batch_size = 1;
    int bptt_window = 16;
    std::uint64_t seed = 42;
    double init_scale = 0.1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// One step of supervised data: the input value and its next-L targets.
struct TrainingPair {
    double input = 0.0;
    std::vector<double> targets;
};

/// One LSTM recurrence step. When `cache` is non-null the activations
/// needed by the backward pass are stored there.
/// Throws "numeric overflow in forward pass" on non-finite intermediates.
StepResult forward_step(const LstmWeights& weights,
                        const LstmState& state,
                        double x,
                        StepCache* cache = nullptr);

/// Mean squared error over the output vector.
double mse_loss(std::span<const double> y, std::span<const double> target);

struct BpttResult {
    LstmWeights gradients;
    LstmState final_state;
    double mean_loss = 0.0;
};

/// Gradients of the summed per-step MSE over the window, by reverse
/// accumulation through the cached activations. The returned state is
/// the forward state after the window, detached from the graph.
BpttResult bptt_gradients(const LstmWeights& weights,
                          std::span<const TrainingPair> window,
                          const LstmState& initial_state);

/// velocity' = momentum * velocity - lr * gradients; weights += velocity'.
void sgd_momentum_update(LstmWeights& weights,
                         Velocity& velocity,
                         const LstmWeights& gradients,
                         double learning_rate,
                         double momentum);

struct TrainResult {
    LstmWeights weights;
    std::vector<double> loss_curve; // one epoch-mean loss per epoch
    std::int64_t clip_events = 0;   // updates where gradient clipping fired
};

/// Train on a unit-scaled series: seeded uniform init, stateful walk in
/// chronological order, one gradient update per BPTT window, state reset
/// at each epoch start.
TrainResult train(const TimeSeries& series, const TrainConfig& config);

/// Train several horizon variants as independent jobs (parallel when
/// OpenMP is enabled); configs differ only in `horizons` typically.
std::vector<TrainResult> train_many(const TimeSeries& series,
                                    std::span<const TrainConfig> configs);

} // namespace lstmad
