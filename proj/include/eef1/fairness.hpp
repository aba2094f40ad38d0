#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eef1/core.hpp"

namespace eef1 {

// Absolute tolerance for boolean fairness comparisons: float noise must not
// flip a verdict, so every ">=" is taken as ">= -kCmpTol".
inline constexpr double kCmpTol = 1e-9;

// An item counts as a member of a fractional bundle once its probability
// mass exceeds this; near-discrete network outputs make membership binary.
inline constexpr double kMembershipEps = 1e-3;

namespace detail {

// Per ordered pair (i, k): agent i's view of bundle k, with the extremal
// single items needed by the one-removal conditions.
struct BundleView {
    double value = 0.0;
    double max_item = -std::numeric_limits<double>::infinity();
    double min_item = std::numeric_limits<double>::infinity();
    // smallest strictly positive item value, +inf if none (EFX removals)
    double min_pos_item = std::numeric_limits<double>::infinity();
    int count = 0;
};

inline std::vector<BundleView> bundle_views(const Instance& inst, const Allocation& alloc) {
    std::vector<BundleView> views(static_cast<std::size_t>(inst.n) * inst.n);
    for (int j = 0; j < inst.m; ++j) {
        int k = alloc.owner(j);
        for (int i = 0; i < inst.n; ++i) {
            BundleView& bv = views[static_cast<std::size_t>(i) * inst.n + k];
            double x = inst.at(i, j);
            bv.value += x;
            bv.max_item = std::max(bv.max_item, x);
            bv.min_item = std::min(bv.min_item, x);
            if (x > 0.0) bv.min_pos_item = std::min(bv.min_pos_item, x);
            bv.count += 1;
        }
    }
    return views;
}

// Fractional bundle values fv[i][k] = sum_j p(k, j) * v(i, j).
inline std::vector<double> fractional_values(const Instance& inst, const FractionalAllocation& frac) {
    std::vector<double> fv(static_cast<std::size_t>(inst.n) * inst.n, 0.0);
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k) {
            double s = 0.0;
            for (int j = 0; j < inst.m; ++j) s += frac.at(k, j) * inst.at(i, j);
            fv[static_cast<std::size_t>(i) * inst.n + k] = s;
        }
    return fv;
}

}  // namespace detail

// Total EF envy: sum_i sum_k max{0, v_i(A_k) - v_i(A_i)} on fractional
// bundle values. Zero exactly on envy-free allocations.
inline double envy_penalty(const Instance& inst, const FractionalAllocation& frac) {
    std::vector<double> fv = detail::fractional_values(inst, frac);
    auto val = [&](int i, int k) { return fv[static_cast<std::size_t>(i) * inst.n + k]; };
    double total = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k) {
            if (k == i) continue;
            total += std::max(0.0, val(i, k) - val(i, i));
        }
    return total;
}

// Total EF1 penalty: the envy gap softened by the best single-item removal,
//   sum_i sum_k max{0, (v_i(A_k) - v_i(A_i)) + min{-max_{j in A_k} v_i(j),
//                                                   min_{j in A_i} v_i(j)}}.
// Bundle membership for the inner max/min is p > kMembershipEps. A removal
// option over an empty bundle is dropped; if both bundles are empty the
// adjustment is 0 and the term reduces to the plain envy gap.
inline double ef1_penalty(const Instance& inst, const FractionalAllocation& frac) {
    const int n = inst.n;
    std::vector<double> fv = detail::fractional_values(inst, frac);
    auto val = [&](int i, int k) { return fv[static_cast<std::size_t>(i) * n + k]; };

    // extremal members per (viewer agent, bundle)
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> max_item(static_cast<std::size_t>(n) * n, -inf);
    std::vector<double> min_item(static_cast<std::size_t>(n) * n, inf);
    for (int j = 0; j < inst.m; ++j)
        for (int k = 0; k < n; ++k) {
            if (frac.at(k, j) <= kMembershipEps) continue;
            for (int i = 0; i < n; ++i) {
                double x = inst.at(i, j);
                auto idx = static_cast<std::size_t>(i) * n + k;
                max_item[idx] = std::max(max_item[idx], x);
                min_item[idx] = std::min(min_item[idx], x);
            }
        }

    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            double gap = val(i, k) - val(i, i);
            double drop_theirs = -max_item[static_cast<std::size_t>(i) * n + k];
            double drop_mine = min_item[static_cast<std::size_t>(i) * n + i];
            // +inf marks an unavailable removal option; both empty -> EF gap
            double adjust = std::min(drop_theirs, drop_mine);
            if (adjust == inf) adjust = 0.0;
            total += std::max(0.0, gap + adjust);
        }
    return total;
}

// EF: v_i(A_i) >= v_i(A_k) for all pairs.
inline bool check_ef(const Instance& inst, const Allocation& alloc) {
    std::vector<detail::BundleView> views = detail::bundle_views(inst, alloc);
    auto bv = [&](int i, int k) -> const detail::BundleView& { return views[static_cast<std::size_t>(i) * inst.n + k]; };
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k)
            if (bv(i, i).value < bv(i, k).value - kCmpTol) return false;
    return true;
}

// EF1: every envy is curable by removing one good from the envied bundle or
// one chore from the envier's own bundle. The best removal from A_k is the
// item i values most; from A_i the item i values least.
inline bool check_ef1(const Instance& inst, const Allocation& alloc) {
    std::vector<detail::BundleView> views = detail::bundle_views(inst, alloc);
    auto bv = [&](int i, int k) -> const detail::BundleView& { return views[static_cast<std::size_t>(i) * inst.n + k]; };
    for (int i = 0; i < inst.n; ++i) {
        double own = bv(i, i).value;
        for (int k = 0; k < inst.n; ++k) {
            if (k == i) continue;
            const detail::BundleView& theirs = bv(i, k);
            if (own >= theirs.value - kCmpTol) continue;
            if (theirs.count > 0 && own >= theirs.value - theirs.max_item - kCmpTol) continue;
            const detail::BundleView& mine = bv(i, i);
            if (mine.count > 0 && own - mine.min_item >= theirs.value - kCmpTol) continue;
            return false;
        }
    }
    return true;
}

// EFX for goods: envy must be curable by removing *any* positively valued
// item from the envied bundle, i.e. even the least valuable one. Undefined
// for instances containing chores.
inline bool check_efx(const Instance& inst, const Allocation& alloc) {
    if (!inst.all_nonnegative())
        throw std::invalid_argument("check_efx: EFX is defined for goods instances only");
    std::vector<detail::BundleView> views = detail::bundle_views(inst, alloc);
    auto bv = [&](int i, int k) -> const detail::BundleView& { return views[static_cast<std::size_t>(i) * inst.n + k]; };
    for (int i = 0; i < inst.n; ++i) {
        double own = bv(i, i).value;
        for (int k = 0; k < inst.n; ++k) {
            if (k == i) continue;
            const detail::BundleView& theirs = bv(i, k);
            if (theirs.min_pos_item == std::numeric_limits<double>::infinity()) continue;  // nothing removable
            if (own < theirs.value - theirs.min_pos_item - kCmpTol) return false;
        }
    }
    return true;
}

struct FairnessVerdict {
    bool is_ef = false;
    bool is_ef1 = false;
    std::optional<bool> is_efx;               // set for goods instances only
    std::optional<std::pair<int, int>> worst_pair;  // (envier, envied) of the strongest violation
};

inline FairnessVerdict verdict(const Instance& inst, const Allocation& alloc) {
    FairnessVerdict out;
    out.is_ef = check_ef(inst, alloc);
    out.is_ef1 = check_ef1(inst, alloc);
    if (inst.all_nonnegative()) out.is_efx = check_efx(inst, alloc);

    if (!out.is_ef) {
        // witness the worst violation of the strongest failed predicate
        FractionalAllocation frac = to_fractional(alloc, inst.n);
        std::vector<double> fv = detail::fractional_values(inst, frac);
        auto val = [&](int i, int k) { return fv[static_cast<std::size_t>(i) * inst.n + k]; };
        std::vector<detail::BundleView> views = detail::bundle_views(inst, alloc);
        auto bv = [&](int i, int k) -> const detail::BundleView& { return views[static_cast<std::size_t>(i) * inst.n + k]; };

        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < inst.n; ++i)
            for (int k = 0; k < inst.n; ++k) {
                if (k == i) continue;
                double gap = val(i, k) - val(i, i);
                double severity = gap;
                if (!out.is_ef1) {
                    bool has_theirs = bv(i, k).count > 0;
                    bool has_mine = bv(i, i).count > 0;
                    if (has_theirs && has_mine)
                        severity = gap + std::min(-bv(i, k).max_item, bv(i, i).min_item);
                    else if (has_theirs)
                        severity = gap - bv(i, k).max_item;
                    else if (has_mine)
                        severity = gap + bv(i, i).min_item;
                }
                if (severity > worst) {
                    worst = severity;
                    out.worst_pair = std::make_pair(i, k);
                }
            }
    }
    return out;
}

}  // namespace eef1
