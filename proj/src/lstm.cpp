#include "lstmad/lstm.hpp"

#include <cmath>
#include <stdexcept>

#include "lstmad/predictor.hpp"
#include "lstmad/rng.hpp"

namespace lstmad {

namespace {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

bool finite_vec(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

constexpr double kClipBound = 5.0;

// Element-wise clip to [-bound, bound]; reports whether anything moved.
bool clip_gradients(LstmWeights& grads, double bound) {
    bool clipped = false;
    grads.for_each_array([&](std::vector<double>& a) {
        for (double& g : a) {
            if (g > bound) {
                g = bound;
                clipped = true;
            } else if (g < -bound) {
                g = -bound;
                clipped = true;
            }
        }
    });
    return clipped;
}

} // namespace

LstmWeights LstmWeights::zeros(int hidden, int horizons) {
    if (hidden < 1) {
        throw std::invalid_argument("hidden size must be at least 1");
    }
    if (horizons < 1 || horizons > 3) {
        throw std::invalid_argument("horizons must be 1, 2 or 3");
    }
    LstmWeights w;
    w.hidden = hidden;
    w.horizons = horizons;
    const std::size_t h = static_cast<std::size_t>(hidden);
    for (GateParams* g : {&w.input_gate, &w.forget_gate, &w.output_gate, &w.candidate}) {
        g->w_x.assign(h, 0.0);
        g->u_h.assign(h * h, 0.0);
        g->b.assign(h, 0.0);
    }
    w.out_w.assign(static_cast<std::size_t>(horizons) * h, 0.0);
    w.out_b.assign(static_cast<std::size_t>(horizons), 0.0);
    return w;
}

bool LstmWeights::all_finite() const {
    bool ok = true;
    for_each_array([&](const std::vector<double>& a) {
        if (!finite_vec(a)) ok = false;
    });
    return ok;
}

LstmState LstmState::zeros(int hidden) {
    LstmState s;
    s.h.assign(static_cast<std::size_t>(hidden), 0.0);
    s.c.assign(static_cast<std::size_t>(hidden), 0.0);
    return s;
}

void TrainConfig::validate() const {
    if (hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
    if (horizons < 1 || horizons > 3) {
        throw std::invalid_argument("horizons must be 1, 2 or 3");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw std::invalid_argument("momentum must be in [0, 1)");
    }
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (bptt_window < 1) throw std::invalid_argument("bptt_window must be >= 1");
    if (batch_size != 1) {
        throw std::invalid_argument("batch_size must be 1");
    }
    if (!(init_scale > 0.0)) {
        throw std::invalid_argument("init_scale must be positive");
    }
}

StepResult forward_step(const LstmWeights& weights, const LstmState& state,
                        double x, StepCache* cache) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("forward_step: non-finite input");
    }
    const int H = weights.hidden;
    const int L = weights.horizons;

    StepResult res;
    res.state.h.resize(static_cast<std::size_t>(H));
    res.state.c.resize(static_cast<std::size_t>(H));
    res.output.resize(static_cast<std::size_t>(L));

    std::vector<double> gi(H), gf(H), go(H), gc(H), tanh_c(H);
    for (int j = 0; j < H; ++j) {
        double ai = weights.input_gate.w_x[j] * x + weights.input_gate.b[j];
        double af = weights.forget_gate.w_x[j] * x + weights.forget_gate.b[j];
        double ao = weights.output_gate.w_x[j] * x + weights.output_gate.b[j];
        double ag = weights.candidate.w_x[j] * x + weights.candidate.b[j];
        const std::size_t row = static_cast<std::size_t>(j) * H;
        for (int k = 0; k < H; ++k) {
            const double hk = state.h[k];
            ai += weights.input_gate.u_h[row + k] * hk;
            af += weights.forget_gate.u_h[row + k] * hk;
            ao += weights.output_gate.u_h[row + k] * hk;
            ag += weights.candidate.u_h[row + k] * hk;
        }
        gi[j] = sigmoid(ai);
        gf[j] = sigmoid(af);
        go[j] = sigmoid(ao);
        gc[j] = std::tanh(ag);
        const double cn = gf[j] * state.c[j] + gi[j] * gc[j];
        res.state.c[j] = cn;
        tanh_c[j] = std::tanh(cn);
        res.state.h[j] = go[j] * tanh_c[j];
    }
    for (int k = 0; k < L; ++k) {
        double z = weights.out_b[k];
        const std::size_t row = static_cast<std::size_t>(k) * H;
        for (int j = 0; j < H; ++j) {
            z += weights.out_w[row + j] * res.state.h[j];
        }
        res.output[k] = sigmoid(z);
    }

    if (!finite_vec(res.state.c) || !finite_vec(res.state.h) ||
        !finite_vec(res.output)) {
        throw std::runtime_error("numeric overflow in forward pass");
    }

    if (cache != nullptr) {
        cache->x = x;
        cache->h_prev = state.h;
        cache->c_prev = state.c;
        cache->gate_in = std::move(gi);
        cache->gate_forget = std::move(gf);
        cache->gate_out = std::move(go);
        cache->cand = std::move(gc);
        cache->c_new = res.state.c;
        cache->tanh_c = std::move(tanh_c);
        cache->h_new = res.state.h;
        cache->y = res.output;
    }
    return res;
}

double mse_loss(std::span<const double> y, std::span<const double> target) {
    if (y.size() != target.size()) {
        throw std::invalid_argument("mse_loss: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double d = y[k] - target[k];
        sum += d * d;
    }
    return sum / static_cast<double>(y.size());
}

BpttResult bptt_gradients(const LstmWeights& weights,
                          std::span<const TrainingPair> window,
                          const LstmState& initial_state) {
    if (window.empty()) {
        throw std::invalid_argument("bptt_gradients: empty window");
    }
    const int H = weights.hidden;
    const int L = weights.horizons;
    const std::size_t T = window.size();

    std::vector<StepCache> caches(T);
    LstmState state = initial_state;
    double loss_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        if (static_cast<int>(window[t].targets.size()) != L) {
            throw std::invalid_argument("bptt_gradients: target length mismatch");
        }
        StepResult step = forward_step(weights, state, window[t].input, &caches[t]);
        state = std::move(step.state);
        loss_sum += mse_loss(step.output, window[t].targets);
    }

    BpttResult res;
    res.gradients = LstmWeights::zeros(H, L);
    res.final_state = state;
    res.mean_loss = loss_sum / static_cast<double>(T);

    // Reverse accumulation. dh/dc carry the recurrent gradient flowing
    // into each step from the one after it; nothing flows past either
    // end of the window.
    std::vector<double> dh(H, 0.0), dc(H, 0.0);
    std::vector<double> dz(L), dcnew(H), dh_prev(H);
    for (std::size_t ti = T; ti-- > 0;) {
        const StepCache& cc = caches[ti];
        LstmWeights& g = res.gradients;

        for (int k = 0; k < L; ++k) {
            const double yk = cc.y[k];
            const double dy = 2.0 * (yk - window[ti].targets[k]) / L;
            dz[k] = dy * yk * (1.0 - yk);
            g.out_b[k] += dz[k];
        }
        for (int j = 0; j < H; ++j) {
            double acc = dh[j];
            for (int k = 0; k < L; ++k) {
                const std::size_t row = static_cast<std::size_t>(k) * H;
                g.out_w[row + j] += dz[k] * cc.h_new[j];
                acc += weights.out_w[row + j] * dz[k];
            }
            dh[j] = acc;
        }

        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (int j = 0; j < H; ++j) {
            const double do_ = dh[j] * cc.tanh_c[j];
            const double dtc = dh[j] * cc.gate_out[j];
            dcnew[j] = dtc * (1.0 - cc.tanh_c[j] * cc.tanh_c[j]) + dc[j];

            const double di = dcnew[j] * cc.cand[j];
            const double dg = dcnew[j] * cc.gate_in[j];
            const double df = dcnew[j] * cc.c_prev[j];
            dc[j] = dcnew[j] * cc.gate_forget[j]; // becomes dc for step t-1

            const double da_i = di * cc.gate_in[j] * (1.0 - cc.gate_in[j]);
            const double da_f = df * cc.gate_forget[j] * (1.0 - cc.gate_forget[j]);
            const double da_o = do_ * cc.gate_out[j] * (1.0 - cc.gate_out[j]);
            const double da_g = dg * (1.0 - cc.cand[j] * cc.cand[j]);

            const std::size_t row = static_cast<std::size_t>(j) * H;
            g.input_gate.w_x[j] += da_i * cc.x;
            g.forget_gate.w_x[j] += da_f * cc.x;
            g.output_gate.w_x[j] += da_o * cc.x;
            g.candidate.w_x[j] += da_g * cc.x;
            g.input_gate.b[j] += da_i;
            g.forget_gate.b[j] += da_f;
            g.output_gate.b[j] += da_o;
            g.candidate.b[j] += da_g;
            for (int k = 0; k < H; ++k) {
                const double hk = cc.h_prev[k];
                g.input_gate.u_h[row + k] += da_i * hk;
                g.forget_gate.u_h[row + k] += da_f * hk;
                g.output_gate.u_h[row + k] += da_o * hk;
                g.candidate.u_h[row + k] += da_g * hk;
                dh_prev[k] += weights.input_gate.u_h[row + k] * da_i +
                              weights.forget_gate.u_h[row + k] * da_f +
                              weights.output_gate.u_h[row + k] * da_o +
                              weights.candidate.u_h[row + k] * da_g;
            }
        }
        dh = dh_prev;
    }

    if (!res.gradients.all_finite()) {
        throw std::runtime_error("numeric overflow in backward pass");
    }
    return res;
}

void sgd_momentum_update(LstmWeights& weights, Velocity& velocity,
                         const LstmWeights& gradients, double learning_rate,
                         double momentum) {
    auto update_array = [&](std::vector<double>& w, std::vector<double>& v,
                            const std::vector<double>& g) {
        if (w.size() != v.size() || w.size() != g.size()) {
            throw std::invalid_argument("sgd_momentum_update: shape mismatch");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            v[i] = momentum * v[i] - learning_rate * g[i];
            w[i] += v[i];
        }
    };
    const auto update_gate = [&](GateParams& wg, GateParams& vg,
                                 const GateParams& gg) {
        update_array(wg.w_x, vg.w_x, gg.w_x);
        update_array(wg.u_h, vg.u_h, gg.u_h);
        update_array(wg.b, vg.b, gg.b);
    };
    update_gate(weights.input_gate, velocity.input_gate, gradients.input_gate);
    update_gate(weights.forget_gate, velocity.forget_gate, gradients.forget_gate);
    update_gate(weights.output_gate, velocity.output_gate, gradients.output_gate);
    update_gate(weights.candidate, velocity.candidate, gradients.candidate);
    update_array(weights.out_w, velocity.out_w, gradients.out_w);
    update_array(weights.out_b, velocity.out_b, gradients.out_b);
}

TrainResult train(const TimeSeries& series, const TrainConfig& config) {
    config.validate();
    const std::int64_t n = static_cast<std::int64_t>(series.values.size());
    if (n <= config.horizons + 1) {
        throw std::invalid_argument("train: series too short for horizon count");
    }

    const std::vector<TrainingPair> pairs =
        make_training_pairs(series, config.horizons);

    TrainResult result;
    result.weights = LstmWeights::zeros(config.hidden_size, config.horizons);
    Rng rng(config.seed);
    result.weights.for_each_array([&](std::vector<double>& a) {
        for (double& w : a) {
            w = rng.uniform(-config.init_scale, config.init_scale);
        }
    });

    Velocity velocity = LstmWeights::zeros(config.hidden_size, config.horizons);
    const std::size_t window = static_cast<std::size_t>(config.bptt_window);
    result.loss_curve.reserve(static_cast<std::size_t>(config.epochs));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        LstmState state = LstmState::zeros(config.hidden_size);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < pairs.size(); begin += window) {
            const std::size_t len = std::min(window, pairs.size() - begin);
            BpttResult step = bptt_gradients(
                result.weights, std::span(pairs).subspan(begin, len), state);
            if (clip_gradients(step.gradients, kClipBound)) {
                ++result.clip_events;
            }
            sgd_momentum_update(result.weights, velocity, step.gradients,
                                config.learning_rate, config.momentum);
            if (!result.weights.all_finite()) {
                throw std::runtime_error("training diverged");
            }
            state = std::move(step.final_state);
            loss_sum += step.mean_loss * static_cast<double>(len);
        }
        const double epoch_loss = loss_sum / static_cast<double>(pairs.size());
        if (!std::isfinite(epoch_loss)) {
            throw std::runtime_error("training diverged");
        }
        result.loss_curve.push_back(epoch_loss);
    }
    return result;
}

std::vector<TrainResult> train_many(const TimeSeries& series,
                                    std::span<const TrainConfig> configs) {
    std::vector<TrainResult> results(configs.size());
    std::vector<std::string> errors(configs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < configs.size(); ++i) {
        try {
            results[i] = train(series, configs[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const std::string& e : errors) {
        if (!e.empty()) throw std::runtime_error(e);
    }
    return results;
}

} // namespace lstmad
