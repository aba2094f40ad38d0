#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eef1/baselines.hpp"
#include "eef1/core.hpp"
#include "eef1/fairness.hpp"
#include "eef1/parallel.hpp"

namespace eef1 {

// A named allocation algorithm under evaluation.
struct Allocator {
    std::string name;
    std::function<Allocation(const Instance&)> run;
};

inline Allocator muw_allocator() { return {"muw", [](const Instance& inst) { return muw(inst); }}; }
inline Allocator rr_allocator() { return {"rr", [](const Instance& inst) { return round_robin(inst); }}; }
inline Allocator drr_allocator() { return {"drr", [](const Instance& inst) { return double_round_robin(inst); }}; }
inline Allocator crr_allocator() { return {"crr", [](const Instance& inst) { return crr(inst); }}; }

// Empirical fairness/efficiency profile of an algorithm on a sample set.
// alpha_* are EF1/EFX/EF rates of the algorithm's allocations; beta_sw is
// E[sw_alg] / E[sw_muw]. EFX is reported for goods distributions only.
struct MetricsReport {
    double alpha_ef1 = 0.0;
    std::optional<double> alpha_efx;
    double alpha_ef = 0.0;
    double beta_sw = 0.0;
    double mean_sw_alg = 0.0;
    double mean_sw_muw = 0.0;
    std::uint64_t samples = 0;
};

// Monte-Carlo evaluation over `samples` freshly drawn instances. Sample k
// always lives on stream k of spec.seed, and per-sample results are reduced
// in index order, so the report is identical for any thread count.
inline MetricsReport evaluate(const Allocator& alg, const DistributionSpec& spec, int n, int m, std::uint64_t samples,
                              int threads = 1) {
    if (samples < 1) throw std::invalid_argument("evaluate: samples must be >= 1");
    const bool goods = dist_is_goods(spec.kind);

    struct PerSample {
        bool ef1 = false, efx = false, ef = false;
        double sw_alg = 0.0, sw_muw = 0.0;
        std::string error;
    };
    std::vector<PerSample> results(samples);

    parallel_for(samples, threads, [&](std::size_t idx) {
        PerSample& out = results[idx];
        try {
            Instance inst = sample_instance(spec, n, m, idx);
            Allocation got = alg.run(inst);
            out.ef1 = check_ef1(inst, got);
            out.ef = check_ef(inst, got);
            if (goods) out.efx = check_efx(inst, got);
            out.sw_alg = social_welfare(inst, got);
            out.sw_muw = social_welfare(inst, muw(inst));
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    MetricsReport report;
    report.samples = samples;
    std::uint64_t ef1 = 0, efx = 0, ef = 0;
    double sw_alg = 0.0, sw_muw = 0.0;
    for (const PerSample& r : results) {
        if (!r.error.empty()) throw std::runtime_error(alg.name + ": " + r.error);
        ef1 += r.ef1;
        efx += r.efx;
        ef += r.ef;
        sw_alg += r.sw_alg;
        sw_muw += r.sw_muw;
    }
    const double count = static_cast<double>(samples);
    report.alpha_ef1 = static_cast<double>(ef1) / count;
    report.alpha_ef = static_cast<double>(ef) / count;
    if (goods) report.alpha_efx = static_cast<double>(efx) / count;
    report.mean_sw_alg = sw_alg / count;
    report.mean_sw_muw = sw_muw / count;
    report.beta_sw = report.mean_sw_alg / report.mean_sw_muw;
    return report;
}

// Convergence thresholds: goods require beta >= 0.99, chores beta <= 1.02,
// both require alpha_ef1 >= 0.99. The beta bound is adjustable (the chores
// RR setting uses a relaxed 1.064).
struct ConvergenceThresholds {
    double alpha_min = 0.99;
    double beta_min = -std::numeric_limits<double>::infinity();
    double beta_max = std::numeric_limits<double>::infinity();

    static ConvergenceThresholds for_dist(Dist kind) {
        ConvergenceThresholds t;
        if (dist_is_goods(kind))
            t.beta_min = 0.99;
        else if (dist_is_chores(kind))
            t.beta_max = 1.02;
        return t;
    }

    bool satisfied(const MetricsReport& r) const {
        return r.alpha_ef1 >= alpha_min && r.beta_sw >= beta_min && r.beta_sw <= beta_max;
    }
};

struct ConvergenceResult {
    std::optional<int> m_star;
    std::vector<std::pair<int, MetricsReport>> grid;
};

// Smallest tested m where the thresholds hold there and at every larger
// tested m. At least three larger grid points must exist, approximating the
// "for all m beyond" quantifier against sampling noise; candidates in the
// last three grid slots therefore never qualify.
inline ConvergenceResult find_m_star(const Allocator& alg, const DistributionSpec& spec, int n,
                                     const std::vector<int>& m_grid, std::uint64_t samples,
                                     const ConvergenceThresholds& thresholds, int threads = 1) {
    if (m_grid.empty()) throw std::invalid_argument("find_m_star: empty grid");
    for (std::size_t i = 1; i < m_grid.size(); ++i)
        if (m_grid[i] <= m_grid[i - 1]) throw std::invalid_argument("find_m_star: grid must be strictly increasing");

    ConvergenceResult result;
    for (int m : m_grid) result.grid.emplace_back(m, evaluate(alg, spec, n, m, samples, threads));

    const std::size_t count = result.grid.size();
    std::vector<bool> ok(count);
    for (std::size_t i = 0; i < count; ++i) ok[i] = thresholds.satisfied(result.grid[i].second);

    std::size_t holds_from = count;  // first index such that ok[i..end) all hold
    for (std::size_t i = count; i-- > 0;) {
        if (!ok[i]) break;
        holds_from = i;
    }
    if (holds_from + 3 < count) result.m_star = result.grid[holds_from].first;
    return result;
}

inline std::vector<int> make_grid(int start, int stop, int step) {
    if (step < 1 || stop < start) throw std::invalid_argument("bad grid");
    std::vector<int> grid;
    for (int m = start; m <= stop; m += step) grid.push_back(m);
    return grid;
}

}  // namespace eef1
