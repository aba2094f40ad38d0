#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eef1/neural/layers.hpp"
#include "eef1/rng.hpp"

using namespace eef1;
using neural::Kernel;
using neural::Tensor;

namespace {

Tensor<double> tensor_from(int c, int h, int w, const std::vector<double>& vals) {
    Tensor<double> t(c, h, w);
    t.data = vals;
    return t;
}

Kernel<double> kernel_from(int co, int ci, int k, const std::vector<double>& vals) {
    Kernel<double> w(co, ci, k);
    w.data = vals;
    return w;
}

void fill_random(std::vector<double>& xs, rng::Stream& stream, double lo = -1.0, double hi = 1.0) {
    for (double& x : xs) x = stream.uniform(lo, hi);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// central-difference gradient of a scalar functional
template <typename Forward>
double fd(Forward&& f, double& param, double h = 1e-6) {
    const double keep = param;
    param = keep + h;
    const double hi = f();
    param = keep - h;
    const double lo = f();
    param = keep;
    return (hi - lo) / (2 * h);
}

}  // namespace

// Frozen cross-check against an independent numpy evaluation.
TEST(Conv, MatchesFrozenOracle) {
    Tensor<double> x = tensor_from(2, 4, 5, {3, 1, 1, 3, 1, 2, 2, -2, -3, -1, -2, 3, 3, -3, 0, 2, -3, 2, -3, 0,
                                             2, -1, -1, -2, 2, -2, 3, 0, 0, 0, 1, 0, 0, 3, 2, 2, 1, 1, -1, 3});
    Kernel<double> w = kernel_from(3, 2, 3, {0, -1, 2, -2, 2, 1,  -2, -2, 0, -2, -2, 0, 2,  0,  2,  2, 2, 1,
                                             0, 0,  -1, 0, -1, -1, 2, -2, -2, -2, 2, 1, 2,  -1, 1,  -1, 0, -2,
                                             1, 2,  1,  -2, 0, -1, 2, 2,  -2, 0, 2, 2, 1,  1,  -2, 1, 0, -2});
    std::vector<double> bias{0.5, -1.0, 2.0};
    Tensor<double> out = neural::conv_forward(x, w, bias);
    ASSERT_EQ(out.channels, 3);
    ASSERT_EQ(out.height, 2);
    ASSERT_EQ(out.width, 3);
    std::vector<double> expect{-6.5, -4.5, 10.5, 16.5, -1.5, -1.5, -33.0, 5.0, 10.0,
                               9.0,  -4.0, 5.0,  0.0,  16.0, 11.0, 8.0,   -5.0, -21.0};
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(out.data[i], expect[i]);
}

TEST(TransposedConv, MatchesFrozenOracle) {
    Tensor<double> x = tensor_from(2, 2, 3, {-2, 0, 2, 0, 1, 3, 1, -1, 1, 1, -3, -3});
    Kernel<double> w = kernel_from(3, 2, 3, {1,  -1, 0, -1, -1, -2, -1, 2,  0,  -1, 0, 2,  -1, 0, 0,  1, 0, 1,
                                             0,  1,  2, -2, 0,  0,  -1, -1, -2, 0,  2, -2, 0,  2, 2,  -1, -2, 1,
                                             -2, -1, 0, 2,  -2, 1,  0,  -2, 2,  2,  0, 2,  1,  2, 2,  0, -1, -2});
    std::vector<double> bias{0.0, 0.0, 0.0};
    Tensor<double> out = neural::tconv_forward(x, w, bias);
    ASSERT_EQ(out.channels, 3);
    ASSERT_EQ(out.height, 4);
    ASSERT_EQ(out.width, 5);
    std::vector<double> expect{-3, 3,  3,  -4, 2,  0,  7,  8,  -11, -10, 2, -3, -1, -2,  -5, 1,  -4, -3, 3,  -3,
                               0,  0,  -8, 6,  2,  4,  4,  -11, 5,  14,  1, 1,  -6, -17, -9, -1, 0,  6,  -2, -9,
                               6,  0,  0,  -4, 2,  -1, -3, -8, -13, -2,  1, 4,  -8, -20, -1, 0,  -1, -1, 5,  12};
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(out.data[i], expect[i]);
}

// tconv with in/out channels swapped in the kernel is the exact adjoint of
// the valid conv: <conv(x; W), y> == <x, tconv(y; W')>.
TEST(TransposedConv, IsAdjointOfConv) {
    rng::Stream stream(11, 0);
    const int ci = 3, co = 4, h = 7, w = 6, k = 3;
    Tensor<double> x(ci, h, w);
    fill_random(x.data, stream);
    Kernel<double> kern(co, ci, k);
    fill_random(kern.data, stream);
    std::vector<double> zero_co(co, 0.0), zero_ci(ci, 0.0);

    Tensor<double> cx = neural::conv_forward(x, kern, zero_co);
    Tensor<double> y(co, cx.height, cx.width);
    fill_random(y.data, stream);

    Kernel<double> swapped(ci, co, k);
    for (int a = 0; a < co; ++a)
        for (int b = 0; b < ci; ++b)
            for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v) swapped.at(b, a, u, v) = kern.at(a, b, u, v);
    Tensor<double> ty = neural::tconv_forward(y, swapped, zero_ci);

    EXPECT_NEAR(dot(cx.data, y.data), dot(x.data, ty.data), 1e-10);
}

TEST(Conv, BackwardMatchesFiniteDifferences) {
    rng::Stream stream(12, 0);
    const int ci = 2, co = 3, h = 5, w = 6, k = 3;
    Tensor<double> x(ci, h, w);
    fill_random(x.data, stream);
    Kernel<double> kern(co, ci, k);
    fill_random(kern.data, stream);
    std::vector<double> bias(co);
    fill_random(bias, stream);
    Tensor<double> probe(co, h - k + 1, w - k + 1);
    fill_random(probe.data, stream);

    auto value = [&] { return dot(neural::conv_forward(x, kern, bias).data, probe.data); };

    Tensor<double> g_in;
    Kernel<double> g_w(co, ci, k);
    std::vector<double> g_b(co, 0.0);
    neural::conv_backward(x, kern, probe, g_in, g_w, g_b);

    for (std::size_t i = 0; i < kern.data.size(); i += 7) EXPECT_NEAR(g_w.data[i], fd(value, kern.data[i]), 1e-7);
    for (std::size_t i = 0; i < bias.size(); ++i) EXPECT_NEAR(g_b[i], fd(value, bias[i]), 1e-7);
    for (std::size_t i = 0; i < x.data.size(); i += 11) EXPECT_NEAR(g_in.data[i], fd(value, x.data[i]), 1e-7);
}

TEST(TransposedConv, BackwardMatchesFiniteDifferences) {
    rng::Stream stream(13, 0);
    const int ci = 3, co = 2, h = 4, w = 5, k = 3;
    Tensor<double> x(ci, h, w);
    fill_random(x.data, stream);
    Kernel<double> kern(co, ci, k);
    fill_random(kern.data, stream);
    std::vector<double> bias(co);
    fill_random(bias, stream);
    Tensor<double> probe(co, h + k - 1, w + k - 1);
    fill_random(probe.data, stream);

    auto value = [&] { return dot(neural::tconv_forward(x, kern, bias).data, probe.data); };

    Tensor<double> g_in;
    Kernel<double> g_w(co, ci, k);
    std::vector<double> g_b(co, 0.0);
    neural::tconv_backward(x, kern, probe, g_in, g_w, g_b);

    for (std::size_t i = 0; i < kern.data.size(); i += 5) EXPECT_NEAR(g_w.data[i], fd(value, kern.data[i]), 1e-7);
    for (std::size_t i = 0; i < bias.size(); ++i) EXPECT_NEAR(g_b[i], fd(value, bias[i]), 1e-7);
    for (std::size_t i = 0; i < x.data.size(); i += 3) EXPECT_NEAR(g_in.data[i], fd(value, x.data[i]), 1e-7);
}

TEST(Softmax, ColumnsSumToOne) {
    rng::Stream stream(14, 0);
    Tensor<double> logits(1, 6, 9);
    fill_random(logits.data, stream, -3.0, 3.0);
    for (double t : {1.0, 0.1, 0.01}) {
        Tensor<double> p = neural::softmax_columns(logits, t);
        for (int x = 0; x < p.width; ++x) {
            double s = 0.0;
            for (int y = 0; y < p.height; ++y) {
                s += p.at(0, y, x);
                EXPECT_GE(p.at(0, y, x), 0.0);
            }
            EXPECT_NEAR(s, 1.0, 1e-9);
        }
    }
}

TEST(Softmax, LargeTemperatureIsUniform) {
    Tensor<double> logits(1, 4, 3);
    rng::Stream stream(15, 0);
    fill_random(logits.data, stream, -2.0, 2.0);
    Tensor<double> p = neural::softmax_columns(logits, 1e6);
    for (double v : p.data) EXPECT_NEAR(v, 0.25, 1e-5);
}

TEST(Softmax, LowTemperatureSharpensToArgmax) {
    Tensor<double> logits(1, 2, 1);
    logits.at(0, 0, 0) = 2.0;
    logits.at(0, 1, 0) = 1.0;
    Tensor<double> p = neural::softmax_columns(logits, 0.01);
    EXPECT_NEAR(p.at(0, 0, 0), 1.0, 1e-12);
    EXPECT_NEAR(p.at(0, 1, 0), 0.0, 1e-12);
    EXPECT_GT(p.at(0, 1, 0), 0.0);  // max subtraction keeps it finite, not a flushed zero
}

TEST(Softmax, BackwardMatchesFiniteDifferences) {
    rng::Stream stream(16, 0);
    Tensor<double> logits(1, 5, 4);
    fill_random(logits.data, stream, -2.0, 2.0);
    Tensor<double> probe(1, 5, 4);
    fill_random(probe.data, stream);
    const double temp = 0.7;

    auto value = [&] { return dot(neural::softmax_columns(logits, temp).data, probe.data); };
    Tensor<double> p = neural::softmax_columns(logits, temp);
    Tensor<double> g = neural::softmax_columns_backward(p, probe, temp);
    for (std::size_t i = 0; i < logits.data.size(); ++i) EXPECT_NEAR(g.data[i], fd(value, logits.data[i]), 1e-7);
}

TEST(Tanh, BackwardUsesStoredActivation) {
    Tensor<double> z(1, 2, 2);
    z.data = {0.3, -1.2, 0.0, 2.5};
    Tensor<double> activated = z;
    neural::tanh_inplace(activated);
    Tensor<double> g(1, 2, 2);
    g.data = {1.0, 1.0, 1.0, 1.0};
    neural::tanh_backward_inplace(activated, g);
    for (int i = 0; i < 4; ++i) {
        double t = std::tanh(z.data[i]);
        EXPECT_NEAR(g.data[i], 1.0 - t * t, 1e-12);
    }
}
