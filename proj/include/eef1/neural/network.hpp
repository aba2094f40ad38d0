#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eef1/core.hpp"
#include "eef1/fairness.hpp"
#include "eef1/neural/layers.hpp"
#include "eef1/neural/tensor.hpp"

namespace eef1::neural {

// Conv-UpConv stack: `series` repetitions of (convs_per_series valid 3x3
// convolutions, then as many 3x3 transposed convolutions), tanh after every
// layer, then a 1x1 projection to one logit channel and a temperature
// softmax across agents per item. Fully convolutional, so one trained model
// runs on any feasible n x m.
struct ArchConfig {
    int series = 3;
    int convs_per_series = 4;
    int hidden_channels = 32;
    int kernel = 3;
    double temperature = 0.01;

    // Each valid conv shrinks both spatial dims by kernel-1.
    int min_spatial() const { return convs_per_series * (kernel - 1) + 1; }

    bool operator==(const ArchConfig&) const = default;
};

inline constexpr int kInputChannels = 6;

enum class LayerKind { Conv, UpConv, Proj };

struct LayerShape {
    LayerKind kind;
    int in_channels;
    int out_channels;
    int k;
};

inline std::vector<LayerShape> layer_plan(const ArchConfig& arch) {
    std::vector<LayerShape> plan;
    int in_ch = kInputChannels;
    for (int s = 0; s < arch.series; ++s) {
        for (int c = 0; c < arch.convs_per_series; ++c) {
            plan.push_back({LayerKind::Conv, in_ch, arch.hidden_channels, arch.kernel});
            in_ch = arch.hidden_channels;
        }
        for (int c = 0; c < arch.convs_per_series; ++c)
            plan.push_back({LayerKind::UpConv, arch.hidden_channels, arch.hidden_channels, arch.kernel});
    }
    plan.push_back({LayerKind::Proj, in_ch, 1, 1});
    return plan;
}

template <typename S>
struct LayerParams {
    LayerKind kind = LayerKind::Conv;
    Kernel<S> w;
    std::vector<S> bias;
};

template <typename S>
struct BasicNetworkParams {
    ArchConfig arch;
    double lambda = 1.0;  // multiplier this model was trained with
    std::vector<LayerParams<S>> layers;

    std::size_t parameter_count() const {
        std::size_t total = 0;
        for (const auto& l : layers) total += l.w.size() + l.bias.size();
        return total;
    }
};

using NetworkParams = BasicNetworkParams<float>;

template <typename To, typename From>
BasicNetworkParams<To> params_cast(const BasicNetworkParams<From>& src) {
    BasicNetworkParams<To> dst;
    dst.arch = src.arch;
    dst.lambda = src.lambda;
    dst.layers.reserve(src.layers.size());
    for (const auto& l : src.layers) {
        LayerParams<To> out;
        out.kind = l.kind;
        out.w = Kernel<To>(l.w.out_channels, l.w.in_channels, l.w.k);
        for (std::size_t i = 0; i < l.w.data.size(); ++i) out.w.data[i] = static_cast<To>(l.w.data[i]);
        out.bias.resize(l.bias.size());
        for (std::size_t i = 0; i < l.bias.size(); ++i) out.bias[i] = static_cast<To>(l.bias[i]);
        dst.layers.push_back(std::move(out));
    }
    return dst;
}

template <typename S>
BasicNetworkParams<S> zero_params(const ArchConfig& arch) {
    BasicNetworkParams<S> params;
    params.arch = arch;
    for (const LayerShape& shape : layer_plan(arch)) {
        LayerParams<S> l;
        l.kind = shape.kind;
        l.w = Kernel<S>(shape.out_channels, shape.in_channels, shape.k);
        l.bias.assign(shape.out_channels, S(0));
        params.layers.push_back(std::move(l));
    }
    return params;
}

inline void check_feasible(const ArchConfig& arch, int n, int m) {
    const int need = arch.min_spatial();
    if (n < need || m < need)
        throw std::invalid_argument("input " + std::to_string(n) + "x" + std::to_string(m) +
                                    " too small for this architecture; valid padding with " +
                                    std::to_string(arch.convs_per_series) + " convolutions per series requires n >= " +
                                    std::to_string(need) + " and m >= " + std::to_string(need));
}

// Six-channel input encoding. Channel 0 is the raw valuation matrix.
// X is the per-item argmax mask (ties to the lowest agent); channels 1..5
// reveal X progressively by item index mod 5, so channel c holds X for items
// with j mod 5 <= c-1 and channel 5 equals X.
template <typename S>
Tensor<S> encode(const Instance& inst) {
    Tensor<S> in(kInputChannels, inst.n, inst.m);
    for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.m; ++j) in.at(0, i, j) = static_cast<S>(inst.at(i, j));
    for (int j = 0; j < inst.m; ++j) {
        int best = 0;
        double best_v = inst.at(0, j);
        for (int i = 1; i < inst.n; ++i)
            if (inst.at(i, j) > best_v) {
                best_v = inst.at(i, j);
                best = i;
            }
        for (int c = 1; c < kInputChannels; ++c)
            if (j % 5 <= c - 1) in.at(c, best, j) = static_cast<S>(best_v);
    }
    return in;
}

template <typename S>
struct ForwardTrace {
    std::vector<Tensor<S>> acts;  // acts[0] = input, acts[l+1] = layer l output (post-tanh)
    Tensor<S> probs;              // 1 x n x m column-stochastic output
};

template <typename S>
void forward_trace(const BasicNetworkParams<S>& params, const Tensor<S>& input, ForwardTrace<S>& trace) {
    check_feasible(params.arch, input.height, input.width);
    trace.acts.clear();
    trace.acts.push_back(input);
    for (const LayerParams<S>& layer : params.layers) {
        const Tensor<S>& prev = trace.acts.back();
        Tensor<S> out;
        switch (layer.kind) {
            case LayerKind::Conv:
            case LayerKind::Proj: out = conv_forward(prev, layer.w, layer.bias); break;
            case LayerKind::UpConv: out = tconv_forward(prev, layer.w, layer.bias); break;
        }
        if (layer.kind != LayerKind::Proj) tanh_inplace(out);
        trace.acts.push_back(std::move(out));
    }
    trace.probs = softmax_columns(trace.acts.back(), static_cast<S>(params.arch.temperature));
}

template <typename S>
FractionalAllocation trace_to_fractional(const ForwardTrace<S>& trace) {
    FractionalAllocation frac(trace.probs.height, trace.probs.width);
    for (int i = 0; i < frac.n; ++i)
        for (int j = 0; j < frac.m; ++j) frac.at(i, j) = static_cast<double>(trace.probs.at(0, i, j));
    return frac;
}

template <typename S>
FractionalAllocation forward(const BasicNetworkParams<S>& params, const Instance& inst) {
    ForwardTrace<S> trace;
    forward_trace(params, encode<S>(inst), trace);
    return trace_to_fractional(trace);
}

// Per-item argmax; ties to the lowest agent index.
inline Allocation discretize(const FractionalAllocation& frac) {
    Allocation alloc;
    alloc.assign.resize(frac.m);
    for (int j = 0; j < frac.m; ++j) {
        int best = 0;
        double best_p = frac.at(0, j);
        for (int i = 1; i < frac.n; ++i)
            if (frac.at(i, j) > best_p) {
                best_p = frac.at(i, j);
                best = i;
            }
        alloc.assign[j] = best;
    }
    return alloc;
}

enum class EnvyMode { EF, EF1 };

inline EnvyMode envy_mode_from_name(const std::string& name) {
    if (name == "ef" || name == "EF") return EnvyMode::EF;
    if (name == "ef1" || name == "EF1") return EnvyMode::EF1;
    throw std::invalid_argument("unknown envy mode: " + name);
}

inline const char* envy_mode_name(EnvyMode mode) { return mode == EnvyMode::EF ? "ef" : "ef1"; }

// Gradient buffers, one entry per layer, same shapes as the parameters.
template <typename S>
struct Gradients {
    std::vector<Kernel<S>> w;
    std::vector<std::vector<S>> bias;

    explicit Gradients(const BasicNetworkParams<S>& params) {
        for (const auto& l : params.layers) {
            w.emplace_back(l.w.out_channels, l.w.in_channels, l.w.k);
            bias.emplace_back(l.bias.size(), S(0));
        }
    }
    void zero() {
        for (auto& k : w) std::fill(k.data.begin(), k.data.end(), S(0));
        for (auto& b : bias) std::fill(b.begin(), b.end(), S(0));
    }
    void scale(S factor) {
        for (auto& k : w)
            for (S& v : k.data) v *= factor;
        for (auto& b : bias)
            for (S& v : b) v *= factor;
    }
};

namespace detail {

// Loss of one sample given its output probabilities, and the gradient of
// that loss with respect to the probabilities.
//
//   loss = (-sw(P, v) + lambda * sum_i envy_i / n) / (n * m)
//
// with sw and envy evaluated on fractional bundle values fv[i][k] =
// sum_j P(k, j) v(i, j). In EF1 mode the one-item adjustment uses the best
// removable item among members (P > kMembershipEps); the item choice is a
// constant w.r.t. P, so gradients flow only through the envy gap, gated by
// the hinge.
template <typename S>
S sample_loss_grad(const Instance& inst, const Tensor<S>& probs, double lambda, EnvyMode mode, Tensor<S>* g_probs) {
    const int n = inst.n;
    const int m = inst.m;
    const S norm = S(1) / (static_cast<S>(n) * static_cast<S>(m));
    const S lam = static_cast<S>(lambda);

    std::vector<S> value(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) value[static_cast<std::size_t>(i) * m + j] = static_cast<S>(inst.at(i, j));
    auto v = [&](int i, int j) { return value[static_cast<std::size_t>(i) * m + j]; };

    std::vector<S> fv(static_cast<std::size_t>(n) * n, S(0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            S s = S(0);
            for (int j = 0; j < m; ++j) s += probs.at(0, k, j) * v(i, j);
            fv[static_cast<std::size_t>(i) * n + k] = s;
        }
    auto fval = [&](int i, int k) { return fv[static_cast<std::size_t>(i) * n + k]; };

    S sw = S(0);
    for (int i = 0; i < n; ++i) sw += fval(i, i);

    // one-item adjustments for EF1 mode; +inf marks an empty option
    constexpr S inf = std::numeric_limits<S>::infinity();
    std::vector<S> max_item, min_item;
    if (mode == EnvyMode::EF1) {
        max_item.assign(static_cast<std::size_t>(n) * n, -inf);
        min_item.assign(static_cast<std::size_t>(n) * n, inf);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < n; ++k) {
                if (probs.at(0, k, j) <= static_cast<S>(kMembershipEps)) continue;
                for (int i = 0; i < n; ++i) {
                    auto idx = static_cast<std::size_t>(i) * n + k;
                    max_item[idx] = std::max(max_item[idx], v(i, j));
                    min_item[idx] = std::min(min_item[idx], v(i, j));
                }
            }
    }

    S envy_total = S(0);
    // active (i, k) pairs contribute v(i, j) to dL/dP(k, j) and -v(i, j) to dL/dP(i, j)
    std::vector<S> pair_active;
    if (g_probs) pair_active.assign(static_cast<std::size_t>(n) * n, S(0));

    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            S gap = fval(i, k) - fval(i, i);
            S term;
            if (mode == EnvyMode::EF) {
                term = gap;
            } else {
                S drop_theirs = -max_item[static_cast<std::size_t>(i) * n + k];
                S drop_mine = min_item[static_cast<std::size_t>(i) * n + i];
                // +inf marks an unavailable removal option; both empty -> EF gap
                S adjust = std::min(drop_theirs, drop_mine);
                if (adjust == inf) adjust = S(0);
                term = gap + adjust;
            }
            if (term > S(0)) {
                envy_total += term;
                if (g_probs) pair_active[static_cast<std::size_t>(i) * n + k] = S(1);
            }
        }

    const S loss = norm * (-sw + lam * envy_total / static_cast<S>(n));

    if (g_probs) {
        *g_probs = Tensor<S>(1, n, m);
        const S envy_coef = norm * lam / static_cast<S>(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) g_probs->at(0, i, j) = -norm * v(i, j);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                if (k == i || pair_active[static_cast<std::size_t>(i) * n + k] == S(0)) continue;
                for (int j = 0; j < m; ++j) {
                    g_probs->at(0, k, j) += envy_coef * v(i, j);
                    g_probs->at(0, i, j) -= envy_coef * v(i, j);
                }
            }
    }
    return loss;
}

}  // namespace detail

// Backpropagate a probability-space gradient through the trace, adding
// parameter gradients into `grads`.
template <typename S>
void backward_trace(const BasicNetworkParams<S>& params, const ForwardTrace<S>& trace, const Tensor<S>& g_probs,
                    Gradients<S>& grads) {
    Tensor<S> g = softmax_columns_backward(trace.probs, g_probs, static_cast<S>(params.arch.temperature));
    for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
        const LayerParams<S>& layer = params.layers[l];
        const Tensor<S>& input = trace.acts[l];
        const Tensor<S>& output = trace.acts[l + 1];
        if (layer.kind != LayerKind::Proj) tanh_backward_inplace(output, g);
        Tensor<S> g_in;
        switch (layer.kind) {
            case LayerKind::Conv:
            case LayerKind::Proj: conv_backward(input, layer.w, g, g_in, grads.w[l], grads.bias[l]); break;
            case LayerKind::UpConv: tconv_backward(input, layer.w, g, g_in, grads.w[l], grads.bias[l]); break;
        }
        g = std::move(g_in);
    }
}

// Mean Lagrangian loss over a batch; when `grads` is non-null the mean
// parameter gradient is accumulated into it (caller zeroes beforehand).
template <typename S>
double loss(const BasicNetworkParams<S>& params, std::span<const Instance> batch, double lambda, EnvyMode mode,
            Gradients<S>* grads = nullptr) {
    if (batch.empty()) throw std::invalid_argument("loss: empty batch");
    double total = 0.0;
    ForwardTrace<S> trace;
    for (const Instance& inst : batch) {
        forward_trace(params, encode<S>(inst), trace);
        Tensor<S> g_probs;
        total += static_cast<double>(
            detail::sample_loss_grad<S>(inst, trace.probs, lambda, mode, grads ? &g_probs : nullptr));
        if (grads) {
            const S inv_batch = S(1) / static_cast<S>(batch.size());
            for (S& v : g_probs.data) v *= inv_batch;
            backward_trace(params, trace, g_probs, *grads);
        }
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace eef1::neural
