#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace eef1::rng {

// splitmix64 finalizer, applied twice to decorrelate nearby inputs.
inline std::uint64_t mix64(std::uint64_t z) {
    for (int round = 0; round < 2; ++round) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
    }
    return z;
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// One independent random stream. Streams derived from the same base seed are
// addressable by index, so drawing sample k in a worker thread yields exactly
// the bytes a serial loop would have produced.
//
// The generator is std::mt19937_64 (its output sequence is pinned by the
// standard); all value transforms are done here rather than through
// std::*_distribution, whose algorithms are implementation-defined.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : gen_(stream_seed(seed, stream)) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Box-Muller; one draw consumes two uniforms.
    double gaussian(double mu, double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * 3.141592653589793238462643 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(gaussian(mu, sigma)); }

    double exponential(double rate) { return -std::log(1.0 - uniform01()) / rate; }

    // Bounded integer in [0, k); modulo bias is irrelevant at these ranges.
    std::uint64_t below(std::uint64_t k) { return gen_() % k; }

    template <typename T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace eef1::rng
