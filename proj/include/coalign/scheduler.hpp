#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "coalign/embedding.hpp"
#include "coalign/error.hpp"
#include "coalign/plan.hpp"
#include "coalign/timeline.hpp"

namespace coalign {

enum class ChannelMode { PerChannel, Merged };

struct AlignConfig {
    double delta = 0.3;        // alignment window around word starts
    double tick = 0.05;        // grid resolution
    double tail_margin = 1.0;  // actions may run this far past speech end
    ChannelMode channel_mode = ChannelMode::PerChannel;

    // Ablation toggles. modal_sync gates the |T - t^s| < delta indicator,
    // context_map gates the similarity weights, temporal_plan selects the
    // optimal solve vs greedy earliest-feasible placement.
    bool modal_sync = true;
    bool context_map = true;
    bool temporal_plan = true;

    void validate() const {
        if (!(delta > 0.0) || !(tick > 0.0) || !(tick <= delta) || !(tail_margin >= 0.0))
            throw Error(ErrorKind::FormatError, "align config out of range");
    }
};

struct ScheduleEntry {
    std::string id;
    Channel channel = Channel::Motion;
    double start_s = 0.0;
    double duration_s = 0.0;
    std::optional<int> matched_word_index;
    double term_score = 0.0;
    int start_tick = 0;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;  // plan order: expressions then motions
    double objective = 0.0;
    double horizon = 0.0;
    double tick = 0.05;
};

// ---------------------------------------------------------------------------
// grid arithmetic
//
// All constraint decisions are made in integer ticks so the solver, the
// oracle and check_constraints agree exactly:
//   precedence  T_p + d_p <= T_q      <=>  k_q >= k_p + ceil(d_p / tick)
//   conflict    |T_j - T_k| > max(d)  <=>  |k_j - k_k| >= floor(max(d)/tick) + 1

namespace grid {

inline int ceil_ticks(double seconds, double tick) {
    return static_cast<int>(std::ceil(seconds / tick - 1e-9));
}

inline int min_sep_ticks(double seconds, double tick) {
    return static_cast<int>(std::floor(seconds / tick + 1e-9)) + 1;
}

inline int max_start_tick(double duration, double horizon, double tick) {
    return static_cast<int>(std::floor((horizon - duration) / tick + 1e-9));
}

}  // namespace grid

// ---------------------------------------------------------------------------
// objective

// Eq-style per-action term at candidate start time t: the best retained
// similarity whose word start lies within delta of t. Out-of-window pairs
// contribute zero, so the term is never negative.
inline double action_score(size_t action_index, double t, const RelevanceMatrix& matrix,
                           const WordTimeline& timeline, const AlignConfig& config) {
    double best = 0.0;
    for (size_t i = 0; i < matrix.word_count; ++i) {
        if (!matrix.retained(i, action_index)) continue;
        const double s = config.context_map ? matrix.at(i, action_index) : 1.0;
        const bool in_window =
            !config.modal_sync || std::abs(t - timeline.entries[i].t_start) < config.delta;
        if (in_window && s > best) best = s;
    }
    return best;
}

// Word index achieving action_score at t (smallest index on ties), if the
// score is positive.
inline std::optional<int> matched_word(size_t action_index, double t,
                                       const RelevanceMatrix& matrix,
                                       const WordTimeline& timeline,
                                       const AlignConfig& config) {
    double best = 0.0;
    std::optional<int> arg;
    for (size_t i = 0; i < matrix.word_count; ++i) {
        if (!matrix.retained(i, action_index)) continue;
        const double s = config.context_map ? matrix.at(i, action_index) : 1.0;
        const bool in_window =
            !config.modal_sync || std::abs(t - timeline.entries[i].t_start) < config.delta;
        if (in_window && s > best) {
            best = s;
            arg = static_cast<int>(i);
        }
    }
    return arg;
}

// ---------------------------------------------------------------------------
// problem compilation

namespace detail {

struct CompiledProblem {
    struct Act {
        std::string id;
        Channel channel = Channel::Motion;
        double duration = 0.0;
        int max_tick = -1;     // largest feasible start tick
        int pred = -1;         // chain predecessor (plan index), -1 if chain head
        int pred_gap = 0;      // min tick gap after pred
        int succ = -1;         // chain successor
    };
    std::vector<Act> acts;
    struct ConflictEdge {
        int a = 0, b = 0;  // plan indices, a < b
        int sep = 0;       // min |tick difference|
    };
    std::vector<ConflictEdge> conflicts;
    double horizon = 0.0;
    std::vector<std::vector<double>> score;  // [action][tick]
};

inline CompiledProblem compile_problem(const ExpressionPlan& plan, const WordTimeline& timeline,
                                       const RelevanceMatrix& matrix,
                                       const ActionCatalog& catalog, const AlignConfig& config) {
    config.validate();
    CompiledProblem p;
    p.horizon = timeline.speech_end + config.tail_margin;

    const auto ids = plan.all_actions();
    if (matrix.action_count != ids.size() || matrix.word_count != timeline.entries.size())
        throw Error(ErrorKind::DimError, "relevance matrix shape does not match plan/timeline");

    p.acts.resize(ids.size());
    for (size_t j = 0; j < ids.size(); ++j) {
        auto it = catalog.entries.find(ids[j]);
        if (it == catalog.entries.end())
            throw Error(ErrorKind::PlanInvalid, ids[j] + ": unknown action");
        p.acts[j].id = ids[j];
        p.acts[j].channel =
            j < plan.expressions.size() ? Channel::Expression : Channel::Motion;
        p.acts[j].duration = it->second.duration_s;
        p.acts[j].max_tick = grid::max_start_tick(p.acts[j].duration, p.horizon, config.tick);
    }

    // chain links (non-overlap groups)
    int last_expr = -1, last_motion = -1, last_any = -1;
    for (size_t j = 0; j < p.acts.size(); ++j) {
        int* last = nullptr;
        if (config.channel_mode == ChannelMode::Merged)
            last = &last_any;
        else
            last = p.acts[j].channel == Channel::Expression ? &last_expr : &last_motion;
        if (*last >= 0) {
            p.acts[j].pred = *last;
            p.acts[j].pred_gap = grid::ceil_ticks(p.acts[*last].duration, config.tick);
            p.acts[*last].succ = static_cast<int>(j);
        }
        *last = static_cast<int>(j);
    }

    // conflict edges between every pair of plan occurrences
    for (size_t a = 0; a < p.acts.size(); ++a) {
        for (size_t b = a + 1; b < p.acts.size(); ++b) {
            if (!catalog.in_conflict(p.acts[a].id, p.acts[b].id)) continue;
            CompiledProblem::ConflictEdge e;
            e.a = static_cast<int>(a);
            e.b = static_cast<int>(b);
            e.sep = grid::min_sep_ticks(std::max(p.acts[a].duration, p.acts[b].duration),
                                        config.tick);
            p.conflicts.push_back(e);
        }
    }

    // per-tick score tables
    p.score.resize(p.acts.size());
    for (size_t j = 0; j < p.acts.size(); ++j) {
        const int mt = p.acts[j].max_tick;
        if (mt < 0) continue;
        p.score[j].resize(static_cast<size_t>(mt) + 1);
        for (int k = 0; k <= mt; ++k)
            p.score[j][static_cast<size_t>(k)] =
                action_score(j, k * config.tick, matrix, timeline, config);
    }
    return p;
}

// Greedy earliest-feasible placement in plan order. Returns start ticks, or
// the index of the first unplaceable action.
inline std::optional<int> greedy_place(const CompiledProblem& p, std::vector<int>& ticks_out) {
    ticks_out.assign(p.acts.size(), -1);
    for (size_t j = 0; j < p.acts.size(); ++j) {
        int lo = 0;
        if (p.acts[j].pred >= 0) lo = ticks_out[p.acts[j].pred] + p.acts[j].pred_gap;
        int chosen = -1;
        for (int k = lo; k <= p.acts[j].max_tick; ++k) {
            bool ok = true;
            for (const auto& e : p.conflicts) {
                int other = -1;
                if (e.b == static_cast<int>(j)) other = e.a;
                else if (e.a == static_cast<int>(j)) other = e.b;
                else continue;
                if (other < static_cast<int>(j) && std::abs(k - ticks_out[other]) < e.sep) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                chosen = k;
                break;
            }
        }
        if (chosen < 0) return static_cast<int>(j);
        ticks_out[j] = chosen;
    }
    return std::nullopt;
}

// --- exact DP over the constraint frontier ---------------------------------
//
// Actions are assigned in plan order. The memo state before action i is the
// set of already-assigned actions that still constrain the future: the tail
// of each chain that continues past i, plus conflict partners of unassigned
// actions. Chains keep the frontier small, so the DP is polynomial on
// realistic inputs while remaining exact in general.

struct FrontierDP {
    const CompiledProblem& p;
    std::vector<std::vector<int>> frontier;       // frontier[i]: relevant j < i
    std::vector<bool> packable;                   // frontier fits exact 64-bit packing
    std::vector<std::vector<int>> cf_partners;    // per action, earlier conflict partners+sep
    std::vector<std::vector<int>> cf_seps;
    std::vector<std::unordered_map<uint64_t, double>> memo;
    static constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    explicit FrontierDP(const CompiledProblem& prob) : p(prob) {
        const size_t m = p.acts.size();
        frontier.resize(m + 1);
        cf_partners.resize(m);
        cf_seps.resize(m);
        for (const auto& e : p.conflicts) {
            cf_partners[static_cast<size_t>(e.b)].push_back(e.a);
            cf_seps[static_cast<size_t>(e.b)].push_back(e.sep);
        }
        for (size_t i = 0; i <= m; ++i) {
            for (size_t j = 0; j < i; ++j) {
                bool relevant = false;
                if (p.acts[j].succ >= static_cast<int>(i)) relevant = true;
                for (const auto& e : p.conflicts)
                    if ((e.a == static_cast<int>(j) && e.b >= static_cast<int>(i)) ||
                        (e.b == static_cast<int>(j) && e.a >= static_cast<int>(i)))
                        relevant = true;
                if (relevant) frontier[i].push_back(static_cast<int>(j));
            }
        }
        packable.resize(m + 1);
        for (size_t i = 0; i <= m; ++i) {
            bool ok = frontier[i].size() <= 4;
            for (int j : frontier[i])
                if (p.acts[static_cast<size_t>(j)].max_tick + 1 >= 0xFFFF) ok = false;
            packable[i] = ok;
        }
        memo.resize(m + 1);
    }

    uint64_t key_of(size_t i, const std::vector<int>& all_ticks) const {
        // Frontiers of up to 4 actions pack losslessly into 16-bit fields;
        // states live in per-level maps so i itself needs no encoding.
        // Wider frontiers fall back to FNV-1a (the packed/hashed choice is
        // fixed per level, so the two key spaces never mix).
        if (packable[i]) {
            uint64_t key = 0;
            for (int j : frontier[i])
                key = (key << 16) | (static_cast<uint64_t>(all_ticks[static_cast<size_t>(j)]) + 1);
            return key;
        }
        uint64_t h = 14695981039346656037ull;
        for (int j : frontier[i]) {
            uint64_t v = static_cast<uint64_t>(all_ticks[static_cast<size_t>(j)]) + 1;
            for (int b = 0; b < 4; ++b) {
                h ^= (v >> (8 * b)) & 0xFF;
                h *= 1099511628211ull;
            }
        }
        return h;
    }

    bool feasible_at(size_t i, int k, const std::vector<int>& ticks) const {
        const auto& a = p.acts[i];
        if (k > a.max_tick) return false;
        if (a.pred >= 0 && k < ticks[static_cast<size_t>(a.pred)] + a.pred_gap) return false;
        const auto& partners = cf_partners[i];
        for (size_t c = 0; c < partners.size(); ++c)
            if (std::abs(k - ticks[static_cast<size_t>(partners[c])]) < cf_seps[i][c])
                return false;
        return true;
    }

    // Best objective over actions i..m-1 given the assigned prefix in `ticks`.
    double best_from(size_t i, std::vector<int>& ticks) {
        if (i == p.acts.size()) return 0.0;
        const uint64_t key = key_of(i, ticks);
        auto it = memo[i].find(key);
        if (it != memo[i].end()) return it->second;
        double best = kNegInf;
        int lo = 0;
        if (p.acts[i].pred >= 0)
            lo = ticks[static_cast<size_t>(p.acts[i].pred)] + p.acts[i].pred_gap;
        if (lo < 0) lo = 0;
        for (int k = lo; k <= p.acts[i].max_tick; ++k) {
            if (!feasible_at(i, k, ticks)) continue;
            ticks[i] = k;
            const double v = p.score[i][static_cast<size_t>(k)] + best_from(i + 1, ticks);
            ticks[i] = -1;
            if (v > best) best = v;
        }
        memo[i][key] = best;
        return best;
    }

    // Lexicographically smallest optimal start-tick vector, or nullopt when
    // infeasible.
    std::optional<std::vector<int>> solve_ticks() {
        std::vector<int> ticks(p.acts.size(), -1);
        const double total = best_from(0, ticks);
        if (total == kNegInf) return std::nullopt;
        for (size_t i = 0; i < p.acts.size(); ++i) {
            const double want = best_from(i, ticks);
            int lo = 0;
            if (p.acts[i].pred >= 0)
                lo = ticks[static_cast<size_t>(p.acts[i].pred)] + p.acts[i].pred_gap;
            if (lo < 0) lo = 0;
            bool placed = false;
            for (int k = lo; k <= p.acts[i].max_tick; ++k) {
                if (!feasible_at(i, k, ticks)) continue;
                ticks[i] = k;
                const double v = p.score[i][static_cast<size_t>(k)] + best_from(i + 1, ticks);
                if (v == want) {
                    placed = true;
                    break;
                }
                ticks[i] = -1;
            }
            if (!placed) throw Error(ErrorKind::Internal, "dp reconstruction failed");
        }
        return ticks;
    }
};

inline Schedule make_schedule(const CompiledProblem& p, const std::vector<int>& ticks,
                              const RelevanceMatrix& matrix, const WordTimeline& timeline,
                              const AlignConfig& config) {
    Schedule s;
    s.horizon = p.horizon;
    s.tick = config.tick;
    s.entries.reserve(p.acts.size());
    for (size_t j = 0; j < p.acts.size(); ++j) {
        ScheduleEntry e;
        e.id = p.acts[j].id;
        e.channel = p.acts[j].channel;
        e.start_tick = ticks[j];
        e.start_s = ticks[j] * config.tick;
        e.duration_s = p.acts[j].duration;
        e.term_score = p.score[j][static_cast<size_t>(ticks[j])];
        e.matched_word_index = matched_word(j, e.start_s, matrix, timeline, config);
        s.objective += e.term_score;
        s.entries.push_back(std::move(e));
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve

// Assigns a grid start time to every plan action, maximizing the summed
// alignment score under chain-order, conflict and horizon constraints.
// Returns the grid optimum with the lexicographically smallest start
// vector in plan order; with temporal_plan off, degrades to greedy
// earliest-feasible placement.
inline Schedule solve(const ExpressionPlan& plan, const WordTimeline& timeline,
                      const RelevanceMatrix& matrix, const ActionCatalog& catalog,
                      const AlignConfig& config) {
    const auto p = detail::compile_problem(plan, timeline, matrix, catalog, config);
    if (p.acts.empty()) {
        Schedule s;
        s.horizon = p.horizon;
        s.tick = config.tick;
        return s;
    }

    if (!config.temporal_plan) {
        std::vector<int> ticks;
        if (auto fail = detail::greedy_place(p, ticks))
            throw Error(ErrorKind::Infeasible, p.acts[static_cast<size_t>(*fail)].id);
        return detail::make_schedule(p, ticks, matrix, timeline, config);
    }

    detail::FrontierDP dp(p);
    auto ticks = dp.solve_ticks();
    if (!ticks) {
        std::vector<int> scratch;
        auto fail = detail::greedy_place(p, scratch);
        const size_t culprit = fail ? static_cast<size_t>(*fail) : 0;
        throw Error(ErrorKind::Infeasible, p.acts[culprit].id);
    }
    return detail::make_schedule(p, *ticks, matrix, timeline, config);
}

// ---------------------------------------------------------------------------
// independent constraint verification

// Re-derives every constraint from catalog + config + timeline and reports
// violations (grid snap, ordering, conflict separation, horizon). Empty
// report <=> schedule is valid. Decisions use the same tick arithmetic as
// the solver.
inline std::vector<std::string> check_constraints(const Schedule& schedule,
                                                  const ActionCatalog& catalog,
                                                  const AlignConfig& config,
                                                  const WordTimeline& timeline) {
    std::vector<std::string> report;
    const double horizon = timeline.speech_end + config.tail_margin;
    const double tick = config.tick;

    std::vector<int> ticks(schedule.entries.size(), 0);
    std::vector<double> durs(schedule.entries.size(), 0.0);
    for (size_t j = 0; j < schedule.entries.size(); ++j) {
        const auto& e = schedule.entries[j];
        auto it = catalog.entries.find(e.id);
        if (it == catalog.entries.end()) {
            report.push_back(e.id + ": unknown action");
            continue;
        }
        durs[j] = it->second.duration_s;
        const long long k = std::llround(e.start_s / tick);
        if (k < 0 || std::abs(e.start_s - static_cast<double>(k) * tick) > 1e-9) {
            report.push_back(e.id + ": start not on grid");
            continue;
        }
        ticks[j] = static_cast<int>(k);
        if (ticks[j] > grid::max_start_tick(durs[j], horizon, tick))
            report.push_back(e.id + ": exceeds horizon");
    }

    // ordering within each non-overlap group, in schedule (plan) order
    int last_expr = -1, last_motion = -1, last_any = -1;
    for (size_t j = 0; j < schedule.entries.size(); ++j) {
        if (!catalog.has(schedule.entries[j].id)) continue;
        int* last = nullptr;
        if (config.channel_mode == ChannelMode::Merged)
            last = &last_any;
        else
            last = schedule.entries[j].channel == Channel::Expression ? &last_expr : &last_motion;
        if (*last >= 0) {
            const size_t pj = static_cast<size_t>(*last);
            if (ticks[j] < ticks[pj] + grid::ceil_ticks(durs[pj], tick))
                report.push_back(schedule.entries[pj].id + " overlaps " + schedule.entries[j].id);
        }
        *last = static_cast<int>(j);
    }

    // conflict separation across every pair
    for (size_t a = 0; a < schedule.entries.size(); ++a) {
        for (size_t b = a + 1; b < schedule.entries.size(); ++b) {
            if (!catalog.has(schedule.entries[a].id) || !catalog.has(schedule.entries[b].id))
                continue;
            if (!catalog.in_conflict(schedule.entries[a].id, schedule.entries[b].id)) continue;
            const int sep = grid::min_sep_ticks(std::max(durs[a], durs[b]), tick);
            if (std::abs(ticks[a] - ticks[b]) < sep)
                report.push_back("conflict " + schedule.entries[a].id + " / " +
                                 schedule.entries[b].id + " too close");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json schedule_to_json(const Schedule& schedule,
                                       const std::vector<WordToken>* words = nullptr) {
    nlohmann::json j;
    j["objective"] = schedule.objective;
    j["horizon"] = schedule.horizon;
    j["actions"] = nlohmann::json::array();
    for (const auto& e : schedule.entries) {
        nlohmann::json a;
        a["id"] = e.id;
        a["channel"] = to_string(e.channel);
        a["start_s"] = e.start_s;
        a["duration_s"] = e.duration_s;
        if (e.matched_word_index) {
            a["matched_word_index"] = *e.matched_word_index;
            if (words && *e.matched_word_index < static_cast<int>(words->size()))
                a["matched_word"] = (*words)[static_cast<size_t>(*e.matched_word_index)].surface;
            else
                a["matched_word"] = nullptr;
        } else {
            a["matched_word_index"] = nullptr;
            a["matched_word"] = nullptr;
        }
        a["term_score"] = e.term_score;
        j["actions"].push_back(std::move(a));
    }
    return j;
}

}  // namespace coalign
