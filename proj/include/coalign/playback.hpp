#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalign/scheduler.hpp"
#include "coalign/timeline.hpp"

namespace coalign {

enum class EventKind { WordStart, WordEnd, ActionStart, ActionEnd };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::WordStart: return "WORD_START";
        case EventKind::WordEnd: return "WORD_END";
        case EventKind::ActionStart: return "ACTION_START";
        case EventKind::ActionEnd: return "ACTION_END";
    }
    return "?";
}

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::WordStart;
    std::string id;
    std::string channel;  // speech | expression | motion
};

struct EventLog {
    std::vector<Event> events;  // nondecreasing in time
    double total_duration = 0.0;
};

// Merges the word timeline and the schedule into one time-ordered event
// stream. Re-checks the schedule's structural constraints first (ordering
// per channel, horizon, nonnegative grid starts) and refuses corrupted
// input.
inline EventLog simulate(const Schedule& schedule, const WordTimeline& timeline,
                         const std::vector<WordToken>* words = nullptr) {
    // structural re-check from the schedule's own fields
    int last_expr = -1, last_motion = -1;
    for (size_t j = 0; j < schedule.entries.size(); ++j) {
        const auto& e = schedule.entries[j];
        if (e.start_s < -1e-12)
            throw Error(ErrorKind::ConstraintViolation, e.id + ": negative start");
        if (e.start_s + e.duration_s > schedule.horizon + 1e-9)
            throw Error(ErrorKind::ConstraintViolation, e.id + ": exceeds horizon");
        int* last = e.channel == Channel::Expression ? &last_expr : &last_motion;
        if (*last >= 0) {
            const auto& prev = schedule.entries[static_cast<size_t>(*last)];
            if (prev.start_s + prev.duration_s > e.start_s + 1e-9)
                throw Error(ErrorKind::ConstraintViolation, prev.id + " overlaps " + e.id);
        }
        *last = static_cast<int>(j);
    }

    EventLog log;
    for (const auto& w : timeline.entries) {
        std::string id = words && w.index < static_cast<int>(words->size())
                             ? (*words)[static_cast<size_t>(w.index)].surface
                             : "w" + std::to_string(w.index);
        log.events.push_back({w.t_start, EventKind::WordStart, id, "speech"});
        log.events.push_back({w.t_end, EventKind::WordEnd, id, "speech"});
    }
    for (const auto& e : schedule.entries) {
        const std::string ch = to_string(e.channel);
        log.events.push_back({e.start_s, EventKind::ActionStart, e.id, ch});
        log.events.push_back({e.start_s + e.duration_s, EventKind::ActionEnd, e.id, ch});
    }
    std::stable_sort(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        if (a.channel != b.channel) return a.channel < b.channel;
        return a.id < b.id;
    });
    for (const auto& e : log.events) log.total_duration = std::max(log.total_duration, e.t);
    return log;
}

// ---------------------------------------------------------------------------
// text gantt

namespace detail {

struct GanttBar {
    double t = 0.0, d = 0.0;
    std::string label;
};

inline void paint(std::string& lane, const GanttBar& bar, double cols_per_s) {
    // spans truncate toward zero for reproducible golden output
    int start = static_cast<int>(bar.t * cols_per_s);
    int span = static_cast<int>(bar.d * cols_per_s);
    if (span < 1) span = 1;
    if (start < 0) start = 0;
    if (start >= static_cast<int>(lane.size())) return;
    span = std::min(span, static_cast<int>(lane.size()) - start);
    for (int c = 0; c < span; ++c) {
        char fill = '=';
        if (c == 0)
            fill = '|';
        else if (c - 1 < static_cast<int>(bar.label.size()))
            fill = bar.label[static_cast<size_t>(c - 1)];
        lane[static_cast<size_t>(start + c)] = fill;
    }
}

}  // namespace detail

// Renders speech / expression / motion lanes, one column per
// width/total_duration seconds. Pure function of the log.
inline std::string render_gantt(const EventLog& log, int width) {
    if (width < 20) throw Error(ErrorKind::FormatError, "gantt width must be >= 20");
    static const char* kLaneNames[3] = {"speech    ", "expression", "motion    "};
    std::string lanes[3];
    for (auto& l : lanes) l.assign(static_cast<size_t>(width), '.');

    const double total = log.total_duration;
    const double cols_per_s = total > 0.0 ? static_cast<double>(width) / total : 0.0;

    if (total > 0.0) {
        // pair up starts with their durations
        std::vector<std::pair<const Event*, size_t>> starts;
        for (const auto& e : log.events) {
            if (e.kind != EventKind::WordStart && e.kind != EventKind::ActionStart) continue;
            size_t lane = e.channel == "speech" ? 0 : (e.channel == "expression" ? 1 : 2);
            // find matching end
            double end = e.t;
            const EventKind want =
                e.kind == EventKind::WordStart ? EventKind::WordEnd : EventKind::ActionEnd;
            for (const auto& f : log.events) {
                if (f.kind == want && f.id == e.id && f.channel == e.channel && f.t >= e.t) {
                    end = f.t;
                    break;
                }
            }
            detail::paint(lanes[lane], {e.t, end - e.t, e.id}, cols_per_s);
        }
    }

    std::ostringstream out;
    out << "t=0s";
    for (int c = 4; c < width; ++c) out << ' ';
    out << " t=" << total << "s\n";
    for (int l = 0; l < 3; ++l) out << kLaneNames[l] << " [" << lanes[l] << "]\n";
    return out.str();
}

inline nlohmann::json event_log_to_json(const EventLog& log) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : log.events) {
        nlohmann::json j;
        j["t_s"] = e.t;
        j["kind"] = to_string(e.kind);
        j["id"] = e.id;
        j["channel"] = e.channel;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace coalign
