#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace eef1::neural {

// Channel-major 3D tensor (channels x height x width), the only shape the
// network needs. Scalar type is a template parameter: training runs in
// float, gradient checking in a double shadow.
template <typename S>
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<S> data;

    Tensor() = default;
    Tensor(int c, int h, int w) : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, S(0)) {}

    S at(int c, int y, int x) const {
        assert(c >= 0 && c < channels && y >= 0 && y < height && x >= 0 && x < width);
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    S& at(int c, int y, int x) {
        assert(c >= 0 && c < channels && y >= 0 && y < height && x >= 0 && x < width);
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    std::size_t size() const { return data.size(); }
    void fill(S v) { data.assign(data.size(), v); }
};

// Convolution kernel weights, out_channels x in_channels x k x k.
template <typename S>
struct Kernel {
    int out_channels = 0;
    int in_channels = 0;
    int k = 0;
    std::vector<S> data;

    Kernel() = default;
    Kernel(int co, int ci, int kk)
        : out_channels(co), in_channels(ci), k(kk), data(static_cast<std::size_t>(co) * ci * kk * kk, S(0)) {}

    S at(int co, int ci, int ky, int kx) const {
        return data[((static_cast<std::size_t>(co) * in_channels + ci) * k + ky) * k + kx];
    }
    S& at(int co, int ci, int ky, int kx) {
        return data[((static_cast<std::size_t>(co) * in_channels + ci) * k + ky) * k + kx];
    }

    std::size_t size() const { return data.size(); }
};

}  // namespace eef1::neural
