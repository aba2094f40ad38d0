#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eef1/core.hpp"
#include "eef1/fairness.hpp"

namespace eef1 {

struct OracleResult {
    std::optional<Allocation> best;  // max-welfare EF1 allocation
    double welfare = 0.0;
    std::uint64_t ef1_count = 0;  // number of EF1 allocations
    std::uint64_t total = 0;      // n^m
};

inline constexpr std::uint64_t kDefaultOracleCap = 10'000'000;

// Exhaustive EEF1 ground truth: enumerate every complete allocation as a
// mixed-radix counter over assign vectors (last item as the fastest digit,
// so enumeration is lexicographic), filter by EF1, keep the max-welfare
// survivor. Ties resolve to the lexicographically smallest assign vector
// because only strict welfare improvements replace the incumbent. EF1
// allocations always exist, so `best` is always set.
inline OracleResult exact_eef1(const Instance& inst, std::uint64_t cap = kDefaultOracleCap) {
    const int n = inst.n;
    const int m = inst.m;

    // total = n^m, refusing instances beyond the cap
    std::uint64_t total = 1;
    for (int j = 0; j < m; ++j) {
        if (total > cap / static_cast<std::uint64_t>(n))
            throw std::invalid_argument("instance too large for exact oracle");
        total *= static_cast<std::uint64_t>(n);
    }

    OracleResult result;
    result.total = total;

    Allocation alloc;
    alloc.assign.assign(m, 0);

    // own-bundle welfare maintained incrementally across counter steps
    double welfare = 0.0;
    for (int j = 0; j < m; ++j) welfare += inst.at(0, j);

    bool have_best = false;
    double best_welfare = 0.0;

    for (std::uint64_t step = 0;; ++step) {
        if (check_ef1(inst, alloc)) {
            ++result.ef1_count;
            if (!have_best || welfare > best_welfare) {
                have_best = true;
                best_welfare = welfare;
                result.best = alloc;
            }
        }
        if (step + 1 == total) break;

        // increment the counter from the last digit
        int j = m - 1;
        while (true) {
            int owner = alloc.assign[j];
            welfare -= inst.at(owner, j);
            if (owner + 1 < n) {
                alloc.assign[j] = owner + 1;
                welfare += inst.at(owner + 1, j);
                break;
            }
            alloc.assign[j] = 0;
            welfare += inst.at(0, j);
            --j;
        }
    }

    // canonical recompute; the incremental sum may carry rounding drift
    result.welfare = social_welfare(inst, *result.best);
    return result;
}

// Mean fraction of allocations that are EF1 over a batch of instances.
inline double exact_ef1_rate(const std::vector<Instance>& batch, std::uint64_t cap = kDefaultOracleCap) {
    if (batch.empty()) throw std::invalid_argument("exact_ef1_rate: empty batch");
    double sum = 0.0;
    for (const Instance& inst : batch) {
        OracleResult r = exact_eef1(inst, cap);
        sum += static_cast<double>(r.ef1_count) / static_cast<double>(r.total);
    }
    return sum / static_cast<double>(batch.size());
}

}  // namespace eef1
