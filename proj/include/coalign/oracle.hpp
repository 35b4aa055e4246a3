#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "coalign/scheduler.hpp"

namespace coalign {

// Exhaustive reference solver: enumerates every grid assignment (with early
// pruning by the ordering constraints and an admissible score bound), keeps
// the first maximum found in lexicographic order. Certifies the DP solver
// on small instances; never use it for production-sized plans.
inline Schedule brute_force_solve(const ExpressionPlan& plan, const WordTimeline& timeline,
                                  const RelevanceMatrix& matrix, const ActionCatalog& catalog,
                                  const AlignConfig& config) {
    const auto p = detail::compile_problem(plan, timeline, matrix, catalog, config);
    const size_t m = p.acts.size();
    if (m == 0) {
        Schedule s;
        s.horizon = p.horizon;
        s.tick = config.tick;
        return s;
    }

    double combos = 1.0;
    for (const auto& a : p.acts) combos *= static_cast<double>(a.max_tick + 1);
    if (combos > 1e8)
        throw Error(ErrorKind::TooLarge,
                    "grid^actions = " + std::to_string(combos) + " enumerations");

    // admissible upper bound on the suffix objective, right-folded so that
    // leaf objectives associate exactly like the DP's suffix sums
    std::vector<double> suffix_max(m + 1, 0.0);
    for (size_t i = m; i-- > 0;) {
        double mx = 0.0;
        for (double v : p.score[i])
            if (v > mx) mx = v;
        suffix_max[i] = mx + suffix_max[i + 1];
    }

    std::vector<int> ticks(m, -1), best_ticks;
    double best_obj = 0.0;
    bool have_best = false;
    std::vector<double> prefix(m + 1, 0.0);

    auto conflicts_ok = [&](size_t i, int k) {
        for (const auto& e : p.conflicts) {
            int other = -1;
            if (e.b == static_cast<int>(i)) other = e.a;
            else if (e.a == static_cast<int>(i)) other = e.b;
            else continue;
            if (other < static_cast<int>(i) && std::abs(k - ticks[static_cast<size_t>(other)]) < e.sep)
                return false;
        }
        return true;
    };

    auto leaf_objective = [&]() {
        double obj = 0.0;
        for (size_t i = m; i-- > 0;)
            obj = p.score[i][static_cast<size_t>(ticks[i])] + obj;
        return obj;
    };

    auto dfs = [&](auto&& self, size_t i) -> void {
        if (i == m) {
            const double obj = leaf_objective();
            if (!have_best || obj > best_obj) {
                have_best = true;
                best_obj = obj;
                best_ticks = ticks;
            }
            return;
        }
        int lo = 0;
        if (p.acts[i].pred >= 0)
            lo = ticks[static_cast<size_t>(p.acts[i].pred)] + p.acts[i].pred_gap;
        if (lo < 0) lo = 0;
        for (int k = lo; k <= p.acts[i].max_tick; ++k) {
            if (!conflicts_ok(i, k)) continue;
            prefix[i + 1] = prefix[i] + p.score[i][static_cast<size_t>(k)];
            if (have_best && prefix[i + 1] + suffix_max[i + 1] < best_obj - 1e-9) continue;
            ticks[i] = k;
            self(self, i + 1);
            ticks[i] = -1;
        }
    };
    dfs(dfs, 0);

    if (!have_best) {
        std::vector<int> scratch;
        auto fail = detail::greedy_place(p, scratch);
        const size_t culprit = fail ? static_cast<size_t>(*fail) : 0;
        throw Error(ErrorKind::Infeasible, p.acts[culprit].id);
    }
    return detail::make_schedule(p, best_ticks, matrix, timeline, config);
}

}  // namespace coalign
