#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "eef1/core.hpp"

namespace eef1 {

// Agent order used for one round of picking. Defaults to 0..n-1.
struct PickingOrder {
    std::vector<int> order;

    static PickingOrder identity(int n) {
        PickingOrder po;
        po.order.resize(n);
        std::iota(po.order.begin(), po.order.end(), 0);
        return po;
    }

    bool valid_for(int n) const {
        if (static_cast<int>(order.size()) != n) return false;
        std::vector<bool> seen(n, false);
        for (int a : order) {
            if (a < 0 || a >= n || seen[a]) return false;
            seen[a] = true;
        }
        return true;
    }
};

// Maximum utilitarian welfare: each item goes to the agent valuing it most,
// ties to the lowest agent index. Globally optimal under additivity.
inline Allocation muw(const Instance& inst) {
    Allocation alloc;
    alloc.assign.resize(inst.m);
    for (int j = 0; j < inst.m; ++j) {
        int best = 0;
        double best_v = inst.at(0, j);
        for (int i = 1; i < inst.n; ++i)
            if (inst.at(i, j) > best_v) {
                best_v = inst.at(i, j);
                best = i;
            }
        alloc.assign[j] = best;
    }
    return alloc;
}

namespace detail {

// Picker takes its most valuable remaining item (for chores that is the
// least negative one). Ties to the lowest item index.
inline int favorite_remaining(const Instance& inst, const std::vector<bool>& taken, int agent) {
    int best = -1;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < inst.m; ++j) {
        if (taken[j]) continue;
        if (inst.at(agent, j) > best_v) {
            best_v = inst.at(agent, j);
            best = j;
        }
    }
    return best;
}

}  // namespace detail

// Round robin over a fixed picking order; EF1 for pure goods and for pure
// chores. Mixed-sign instances are rejected.
inline Allocation round_robin(const Instance& inst, const PickingOrder& order) {
    if (!order.valid_for(inst.n)) throw std::invalid_argument("round_robin: picking order is not a permutation of agents");
    if (!inst.all_nonnegative() && !inst.all_nonpositive())
        throw std::invalid_argument("RR requires pure goods or pure chores; use double_round_robin");

    Allocation alloc;
    alloc.assign.assign(inst.m, -1);
    std::vector<bool> taken(inst.m, false);
    int assigned = 0;
    while (assigned < inst.m) {
        for (int a : order.order) {
            if (assigned == inst.m) break;
            int j = detail::favorite_remaining(inst, taken, a);
            taken[j] = true;
            alloc.assign[j] = a;
            ++assigned;
        }
    }
    return alloc;
}

inline Allocation round_robin(const Instance& inst) { return round_robin(inst, PickingOrder::identity(inst.n)); }

// Double round robin for mixed goods and chores.
//
// Phase 1 hands out universal chores (items no agent values positively)
// round-robin in order 0..n-1. The chore pool is padded with dummy items
// valued 0 by everyone so it splits into full rounds; a picker takes a
// dummy whenever every remaining real chore is strictly worse, which is
// what lets early pickers decline chores. Phase 2 allocates the rest
// round-robin in reverse order; a picker takes its best positively valued
// remaining item or skips. If a whole cycle passes with every agent
// skipping, leftovers go one by one to whichever agent values them most.
inline Allocation double_round_robin(const Instance& inst) {
    Allocation alloc;
    alloc.assign.assign(inst.m, -1);
    std::vector<bool> taken(inst.m, false);

    std::vector<bool> universal_chore(inst.m, false);
    int chores = 0;
    for (int j = 0; j < inst.m; ++j) {
        bool all_nonpos = true;
        for (int i = 0; i < inst.n; ++i)
            if (inst.at(i, j) > 0.0) {
                all_nonpos = false;
                break;
            }
        universal_chore[j] = all_nonpos;
        if (all_nonpos) ++chores;
    }

    // Phase 1
    int dummies = (inst.n - chores % inst.n) % inst.n;
    const int slots = chores + dummies;
    for (int slot = 0; slot < slots; ++slot) {
        const int a = slot % inst.n;
        int best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < inst.m; ++j) {
            if (taken[j] || !universal_chore[j]) continue;
            if (inst.at(a, j) > best_v) {
                best_v = inst.at(a, j);
                best = j;
            }
        }
        if (best < 0 || (dummies > 0 && best_v < 0.0)) {
            --dummies;  // pick a dummy instead of a real chore
            continue;
        }
        taken[best] = true;
        alloc.assign[best] = a;
    }

    // Phase 2
    int assigned = 0;
    const int remaining = inst.m - chores;
    while (assigned < remaining) {
        bool any_pick = false;
        for (int a = inst.n - 1; a >= 0 && assigned < remaining; --a) {
            int best = -1;
            double best_v = 0.0;
            for (int j = 0; j < inst.m; ++j) {
                if (taken[j]) continue;
                if (inst.at(a, j) > best_v) {
                    best_v = inst.at(a, j);
                    best = j;
                }
            }
            if (best < 0) continue;  // nothing valued positively: skip turn
            taken[best] = true;
            alloc.assign[best] = a;
            ++assigned;
            any_pick = true;
        }
        if (!any_pick) {
            // full cycle of skips: hand leftovers to their top valuers
            for (int j = 0; j < inst.m; ++j) {
                if (taken[j]) continue;
                int best = 0;
                double best_v = inst.at(0, j);
                for (int i = 1; i < inst.n; ++i)
                    if (inst.at(i, j) > best_v) {
                        best_v = inst.at(i, j);
                        best = i;
                    }
                taken[j] = true;
                alloc.assign[j] = best;
                ++assigned;
            }
        }
    }
    return alloc;
}

// Constrained round robin (goods only): welfare-greedy picking restricted to
// recursively balanced sequences. Within a round, repeatedly assign the
// highest-valued (agent, item) pair among agents not yet served this round;
// ties to the lowest agent index, then the lowest item index.
inline Allocation crr(const Instance& inst) {
    if (!inst.all_nonnegative()) throw std::invalid_argument("CRR implemented for goods only");

    Allocation alloc;
    alloc.assign.assign(inst.m, -1);
    std::vector<bool> taken(inst.m, false);
    int assigned = 0;
    while (assigned < inst.m) {
        std::vector<bool> served(inst.n, false);
        for (int slot = 0; slot < inst.n && assigned < inst.m; ++slot) {
            int best_agent = -1, best_item = -1;
            double best_v = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < inst.n; ++i) {
                if (served[i]) continue;
                for (int j = 0; j < inst.m; ++j) {
                    if (taken[j]) continue;
                    if (inst.at(i, j) > best_v) {
                        best_v = inst.at(i, j);
                        best_agent = i;
                        best_item = j;
                    }
                }
            }
            served[best_agent] = true;
            taken[best_item] = true;
            alloc.assign[best_item] = best_agent;
            ++assigned;
        }
    }
    return alloc;
}

}  // namespace eef1
