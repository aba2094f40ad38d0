#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "eef1/rng.hpp"

namespace eef1 {

// A fair-division problem: n agents, m indivisible items, additive valuations.
// v(i, j) is agent i's value for item j alone; bundle values are sums.
struct Instance {
    int n = 0;
    int m = 0;
    std::vector<double> v;  // row-major n x m

    Instance() = default;
    Instance(int agents, int items) : n(agents), m(items), v(static_cast<std::size_t>(agents) * items, 0.0) {
        if (agents < 1 || items < 1) throw std::invalid_argument("Instance requires n >= 1 and m >= 1");
    }
    Instance(int agents, int items, std::vector<double> values) : n(agents), m(items), v(std::move(values)) {
        if (agents < 1 || items < 1) throw std::invalid_argument("Instance requires n >= 1 and m >= 1");
        if (v.size() != static_cast<std::size_t>(agents) * items)
            throw std::invalid_argument("valuation matrix size mismatch");
        for (double x : v)
            if (!std::isfinite(x)) throw std::invalid_argument("valuations must be finite");
    }

    double at(int i, int j) const {
        assert(i >= 0 && i < n && j >= 0 && j < m);
        return v[static_cast<std::size_t>(i) * m + j];
    }
    double& at(int i, int j) {
        assert(i >= 0 && i < n && j >= 0 && j < m);
        return v[static_cast<std::size_t>(i) * m + j];
    }

    bool all_nonnegative() const {
        for (double x : v)
            if (x < 0.0) return false;
        return true;
    }
    bool all_nonpositive() const {
        for (double x : v)
            if (x > 0.0) return false;
        return true;
    }
};

// Complete integral allocation: item j belongs to agent assign[j].
struct Allocation {
    std::vector<int> assign;

    Allocation() = default;
    explicit Allocation(std::vector<int> a) : assign(std::move(a)) {}

    int owner(int j) const {
        assert(j >= 0 && j < static_cast<int>(assign.size()));
        return assign[j];
    }
    int items() const { return static_cast<int>(assign.size()); }

    bool valid_for(const Instance& inst) const {
        if (static_cast<int>(assign.size()) != inst.m) return false;
        for (int a : assign)
            if (a < 0 || a >= inst.n) return false;
        return true;
    }
};

// Column-stochastic soft assignment: p(i, j) is the probability that agent i
// receives item j; every column sums to 1.
struct FractionalAllocation {
    int n = 0;
    int m = 0;
    std::vector<double> p;  // row-major n x m

    FractionalAllocation() = default;
    FractionalAllocation(int agents, int items) : n(agents), m(items), p(static_cast<std::size_t>(agents) * items, 0.0) {}

    double at(int i, int j) const { return p[static_cast<std::size_t>(i) * m + j]; }
    double& at(int i, int j) { return p[static_cast<std::size_t>(i) * m + j]; }

    bool column_stochastic(double tol = 1e-6) const {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += at(i, j);
            if (std::abs(s - 1.0) > tol) return false;
        }
        return true;
    }
};

inline FractionalAllocation to_fractional(const Allocation& alloc, int n) {
    FractionalAllocation frac(n, alloc.items());
    for (int j = 0; j < alloc.items(); ++j) frac.at(alloc.owner(j), j) = 1.0;
    return frac;
}

enum class Dist {
    UniformGoods,   // U[0,1]
    UniformChores,  // U[-1,0]
    UniformMixed,   // U[-1,1]
    Gaussian,       // mu=0.5, sigma=1 (mixed-sign)
    Lognormal,      // underlying normal mu=0.5, sigma=1 (goods)
    Exponential,    // rate 1 (goods)
};

struct DistributionSpec {
    Dist kind = Dist::UniformGoods;
    std::uint64_t seed = 0;
};

inline const char* dist_name(Dist d) {
    switch (d) {
        case Dist::UniformGoods: return "uniform-goods";
        case Dist::UniformChores: return "uniform-chores";
        case Dist::UniformMixed: return "uniform-mixed";
        case Dist::Gaussian: return "gaussian";
        case Dist::Lognormal: return "lognormal";
        case Dist::Exponential: return "exponential";
    }
    return "?";
}

inline Dist dist_from_name(const std::string& name) {
    if (name == "uniform-goods") return Dist::UniformGoods;
    if (name == "uniform-chores") return Dist::UniformChores;
    if (name == "uniform-mixed") return Dist::UniformMixed;
    if (name == "gaussian") return Dist::Gaussian;
    if (name == "lognormal") return Dist::Lognormal;
    if (name == "exponential") return Dist::Exponential;
    throw std::invalid_argument("unknown distribution: " + name);
}

// Sign pattern of a distribution's support, used to pick applicable
// algorithms and metrics (EFX is defined here for goods only).
inline bool dist_is_goods(Dist d) {
    return d == Dist::UniformGoods || d == Dist::Lognormal || d == Dist::Exponential;
}
inline bool dist_is_chores(Dist d) { return d == Dist::UniformChores; }

inline double draw_value(rng::Stream& s, Dist kind) {
    switch (kind) {
        case Dist::UniformGoods: return s.uniform01();
        case Dist::UniformChores: return s.uniform(-1.0, 0.0);
        case Dist::UniformMixed: return s.uniform(-1.0, 1.0);
        case Dist::Gaussian: return s.gaussian(0.5, 1.0);
        case Dist::Lognormal: return s.lognormal(0.5, 1.0);
        case Dist::Exponential: return s.exponential(1.0);
    }
    return 0.0;
}

// Sample instance number `sample_index` of the stream identified by
// spec.seed. Entries are i.i.d., drawn row-major. Each sample owns a private
// RNG stream, so batches may be generated in any order or in parallel.
inline Instance sample_instance(const DistributionSpec& spec, int n, int m, std::uint64_t sample_index = 0) {
    if (n < 1 || m < 1) throw std::invalid_argument("sample_instance requires n >= 1 and m >= 1");
    rng::Stream stream(spec.seed, sample_index);
    Instance inst(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) inst.at(i, j) = draw_value(stream, spec.kind);
    return inst;
}

// v_i(A_k): agent i's additive value for the bundle held by agent k.
inline double bundle_value(const Instance& inst, const Allocation& alloc, int i, int k) {
    assert(alloc.valid_for(inst));
    assert(i >= 0 && i < inst.n && k >= 0 && k < inst.n);
    double sum = 0.0;
    for (int j = 0; j < inst.m; ++j)
        if (alloc.owner(j) == k) sum += inst.at(i, j);
    return sum;
}

// sw(A, v) = sum_i v_i(A_i)
inline double social_welfare(const Instance& inst, const Allocation& alloc) {
    assert(alloc.valid_for(inst));
    double sum = 0.0;
    for (int j = 0; j < inst.m; ++j) sum += inst.at(alloc.owner(j), j);
    return sum;
}

}  // namespace eef1
