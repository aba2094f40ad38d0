#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eef1/neural/network.hpp"
#include "eef1/rng.hpp"

namespace eef1::neural {

struct TrainConfig {
    double learning_rate = 0.001;
    int batch_size = 256;
    int epochs = 0;
    double lambda = 1.0;
    EnvyMode envy_mode = EnvyMode::EF;
    std::uint64_t seed = 0;
    // Adam moment decays and epsilon, conventional defaults
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    // observer, called after each epoch with the mean training loss
    std::function<void(int, double)> on_epoch;
};

struct TrainingDivergence : std::runtime_error {
    int epoch;
    int batch;
    TrainingDivergence(int e, int b)
        : std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(e) + ", batch " +
                             std::to_string(b)),
          epoch(e),
          batch(b) {}
};

// Xavier-uniform: U(-a, a) with a^2 = 6 / (fan_in + fan_out), fans counted
// over the receptive field. Biases start at zero. Stream 0 of the seed is
// reserved for initialization.
template <typename S>
BasicNetworkParams<S> xavier_init(const ArchConfig& arch, std::uint64_t seed) {
    BasicNetworkParams<S> params = zero_params<S>(arch);
    rng::Stream stream(seed, 0);
    for (LayerParams<S>& layer : params.layers) {
        const double fan_in = static_cast<double>(layer.w.in_channels) * layer.w.k * layer.w.k;
        const double fan_out = static_cast<double>(layer.w.out_channels) * layer.w.k * layer.w.k;
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (S& v : layer.w.data) v = static_cast<S>(stream.uniform(-a, a));
    }
    return params;
}

template <typename S>
class AdamOptimizer {
public:
    AdamOptimizer(const BasicNetworkParams<S>& params, double lr, double beta1, double beta2, double epsilon)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(params), v_(params) {
        m_.zero();
        v_.zero();
    }

    void step(BasicNetworkParams<S>& params, const Gradients<S>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            update(params.layers[l].w.data, grads.w[l].data, m_.w[l].data, v_.w[l].data, bc1, bc2);
            update(params.layers[l].bias, grads.bias[l], m_.bias[l], v_.bias[l], bc1, bc2);
        }
    }

private:
    void update(std::vector<S>& w, const std::vector<S>& g, std::vector<S>& m, std::vector<S>& v, double bc1,
                double bc2) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = static_cast<S>(beta1_ * m[i] + (1.0 - beta1_) * g[i]);
            v[i] = static_cast<S>(beta2_ * v[i] + (1.0 - beta2_) * static_cast<double>(g[i]) * g[i]);
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] = static_cast<S>(w[i] - lr_ * mhat / (std::sqrt(vhat) + eps_));
        }
    }

    double lr_, beta1_, beta2_, eps_;
    Gradients<S> m_, v_;
    std::uint64_t t_ = 0;
};

// Mini-batch Adam training. Serial execution is deterministic for a fixed
// seed: initialization uses stream 0 and the epoch-e shuffle uses stream
// e+1, all derived from cfg.seed.
inline NetworkParams train(const std::vector<Instance>& data, const ArchConfig& arch, const TrainConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (cfg.lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
    for (const Instance& inst : data) check_feasible(arch, inst.n, inst.m);

    NetworkParams params = xavier_init<float>(arch, cfg.seed);
    params.lambda = cfg.lambda;
    if (cfg.epochs == 0) return params;

    AdamOptimizer<float> adam(params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
    Gradients<float> grads(params);

    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<Instance> batch;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng::Stream shuffle_stream(cfg.seed, static_cast<std::uint64_t>(epoch) + 1);
        shuffle_stream.shuffle(perm);

        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < perm.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(perm.size(), start + cfg.batch_size);
            batch.clear();
            for (std::size_t idx = start; idx < end; ++idx) batch.push_back(data[perm[idx]]);

            grads.zero();
            double batch_loss = loss<float>(params, batch, cfg.lambda, cfg.envy_mode, &grads);
            if (!std::isfinite(batch_loss)) throw TrainingDivergence(epoch, batches);
            adam.step(params, grads);
            epoch_loss += batch_loss;
            ++batches;
        }
        if (cfg.on_epoch) cfg.on_epoch(epoch, epoch_loss / batches);
    }
    return params;
}

}  // namespace eef1::neural
