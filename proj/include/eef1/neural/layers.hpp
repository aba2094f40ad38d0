#pragma once

#include <cmath>

#include "eef1/neural/tensor.hpp"

namespace eef1::neural {

// Valid-padding stride-1 convolution: output is (H-k+1) x (W-k+1).
template <typename S>
Tensor<S> conv_forward(const Tensor<S>& in, const Kernel<S>& w, const std::vector<S>& bias) {
    const int oh = in.height - w.k + 1;
    const int ow = in.width - w.k + 1;
    Tensor<S> out(w.out_channels, oh, ow);
    for (int co = 0; co < w.out_channels; ++co)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                S acc = bias[co];
                for (int ci = 0; ci < w.in_channels; ++ci)
                    for (int ky = 0; ky < w.k; ++ky)
                        for (int kx = 0; kx < w.k; ++kx)
                            acc += in.at(ci, y + ky, x + kx) * w.at(co, ci, ky, kx);
                out.at(co, y, x) = acc;
            }
    return out;
}

template <typename S>
void conv_backward(const Tensor<S>& in, const Kernel<S>& w, const Tensor<S>& g_out, Tensor<S>& g_in, Kernel<S>& g_w,
                   std::vector<S>& g_bias) {
    g_in = Tensor<S>(in.channels, in.height, in.width);
    for (int co = 0; co < w.out_channels; ++co)
        for (int y = 0; y < g_out.height; ++y)
            for (int x = 0; x < g_out.width; ++x) {
                const S g = g_out.at(co, y, x);
                g_bias[co] += g;
                for (int ci = 0; ci < w.in_channels; ++ci)
                    for (int ky = 0; ky < w.k; ++ky)
                        for (int kx = 0; kx < w.k; ++kx) {
                            g_w.at(co, ci, ky, kx) += in.at(ci, y + ky, x + kx) * g;
                            g_in.at(ci, y + ky, x + kx) += w.at(co, ci, ky, kx) * g;
                        }
            }
}

// Stride-1 transposed convolution, the adjoint of the valid convolution:
// output grows to (H+k-1) x (W+k-1).
template <typename S>
Tensor<S> tconv_forward(const Tensor<S>& in, const Kernel<S>& w, const std::vector<S>& bias) {
    const int oh = in.height + w.k - 1;
    const int ow = in.width + w.k - 1;
    Tensor<S> out(w.out_channels, oh, ow);
    for (int co = 0; co < w.out_channels; ++co)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) out.at(co, y, x) = bias[co];
    for (int ci = 0; ci < w.in_channels; ++ci)
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x) {
                const S v = in.at(ci, y, x);
                for (int co = 0; co < w.out_channels; ++co)
                    for (int ky = 0; ky < w.k; ++ky)
                        for (int kx = 0; kx < w.k; ++kx) out.at(co, y + ky, x + kx) += v * w.at(co, ci, ky, kx);
            }
    return out;
}

template <typename S>
void tconv_backward(const Tensor<S>& in, const Kernel<S>& w, const Tensor<S>& g_out, Tensor<S>& g_in, Kernel<S>& g_w,
                    std::vector<S>& g_bias) {
    g_in = Tensor<S>(in.channels, in.height, in.width);
    for (int co = 0; co < w.out_channels; ++co)
        for (int y = 0; y < g_out.height; ++y)
            for (int x = 0; x < g_out.width; ++x) g_bias[co] += g_out.at(co, y, x);
    for (int ci = 0; ci < w.in_channels; ++ci)
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x) {
                const S v = in.at(ci, y, x);
                S acc = S(0);
                for (int co = 0; co < w.out_channels; ++co)
                    for (int ky = 0; ky < w.k; ++ky)
                        for (int kx = 0; kx < w.k; ++kx) {
                            const S g = g_out.at(co, y + ky, x + kx);
                            g_w.at(co, ci, ky, kx) += v * g;
                            acc += w.at(co, ci, ky, kx) * g;
                        }
                g_in.at(ci, y, x) = acc;
            }
}

template <typename S>
void tanh_inplace(Tensor<S>& t) {
    for (S& v : t.data) v = std::tanh(v);
}

// g_z = g_out * (1 - tanh(z)^2), from the stored post-activation values.
template <typename S>
void tanh_backward_inplace(const Tensor<S>& activated, Tensor<S>& g) {
    for (std::size_t idx = 0; idx < g.data.size(); ++idx) g.data[idx] *= S(1) - activated.data[idx] * activated.data[idx];
}

// Column-wise softmax with temperature over the agent (height) axis of a
// single-channel logit map. The column max is subtracted first; at T = 0.01
// the exponents are otherwise far outside float range.
template <typename S>
Tensor<S> softmax_columns(const Tensor<S>& logits, S temperature) {
    Tensor<S> p(1, logits.height, logits.width);
    for (int x = 0; x < logits.width; ++x) {
        S mx = logits.at(0, 0, x);
        for (int y = 1; y < logits.height; ++y) mx = std::max(mx, logits.at(0, y, x));
        S sum = S(0);
        for (int y = 0; y < logits.height; ++y) {
            S e = std::exp((logits.at(0, y, x) - mx) / temperature);
            p.at(0, y, x) = e;
            sum += e;
        }
        for (int y = 0; y < logits.height; ++y) p.at(0, y, x) /= sum;
    }
    return p;
}

template <typename S>
Tensor<S> softmax_columns_backward(const Tensor<S>& p, const Tensor<S>& g_p, S temperature) {
    Tensor<S> g_logits(1, p.height, p.width);
    for (int x = 0; x < p.width; ++x) {
        S dot = S(0);
        for (int y = 0; y < p.height; ++y) dot += g_p.at(0, y, x) * p.at(0, y, x);
        for (int y = 0; y < p.height; ++y)
            g_logits.at(0, y, x) = p.at(0, y, x) * (g_p.at(0, y, x) - dot) / temperature;
    }
    return g_logits;
}

}  // namespace eef1::neural
