#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalign/error.hpp"
#include "coalign/plan.hpp"

namespace coalign {

// Baseline word durations: explicit per-word overrides, otherwise a
// per-character rate clamped to [min_s, max_s]. The defaults are
// placeholders for a real synthesizer's timing model and are fully
// overridable from a lexicon file.
struct DurationLexicon {
    std::map<std::string, double> overrides;
    double rate_s_per_char = 0.08;
    double min_s = 0.15;
    double max_s = 0.80;

    void validate() const {
        for (const auto& [w, d] : overrides)
            if (!(d > 0.0)) throw Error(ErrorKind::FormatError, "override for '" + w + "'");
        if (!(rate_s_per_char > 0.0) || !(min_s > 0.0) || !(min_s <= max_s))
            throw Error(ErrorKind::FormatError, "default_rule");
    }
};

struct SpeedConfig {
    double slow_factor = 1.25;
    double normal_factor = 1.0;
    double fast_factor = 0.8;

    double factor(const Speed& s) const {
        if (s.multiplier) return *s.multiplier;
        switch (s.level) {
            case SpeedLevel::Slow: return slow_factor;
            case SpeedLevel::Fast: return fast_factor;
            case SpeedLevel::Normal: break;
        }
        return normal_factor;
    }
};

// Optional pauses inserted as gaps after flagged punctuation. Off by
// default; the default timeline is contiguous.
struct PauseConfig {
    bool enabled = false;
    double comma_s = 0.20;
    double sentence_s = 0.35;
};

struct WordTimeline {
    struct Entry {
        int index = 0;
        double t_start = 0.0;
        double t_end = 0.0;
    };
    std::vector<Entry> entries;
    double speech_end = 0.0;
};

namespace detail {

inline size_t codepoint_count(const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

}  // namespace detail

// Baseline duration of a single word: lexicon override, else clamped
// char-rate estimate over the normalized form.
inline double word_duration(const WordToken& word, const DurationLexicon& lexicon) {
    auto it = lexicon.overrides.find(word.normalized);
    if (it != lexicon.overrides.end()) return it->second;
    double est = lexicon.rate_s_per_char *
                 static_cast<double>(detail::codepoint_count(word.normalized));
    return std::clamp(est, lexicon.min_s, lexicon.max_s);
}

// Lays words end to end: t_start_i = alpha * sum of preceding durations,
// t_end_i = t_start_i + alpha * tau(w_i). Running sums are accumulated at
// alpha=1 and scaled once so timestamps scale exactly with alpha.
inline WordTimeline build_timeline(const std::vector<WordToken>& words,
                                   const DurationLexicon& lexicon, double alpha,
                                   const PauseConfig& pauses = {}) {
    if (words.empty()) throw Error(ErrorKind::EmptySpeech, "no words");
    WordTimeline tl;
    tl.entries.reserve(words.size());
    double cum = 0.0;  // unscaled running total incl. pause gaps
    for (const auto& w : words) {
        WordTimeline::Entry e;
        e.index = w.index;
        e.t_start = cum * alpha;
        cum += word_duration(w, lexicon);
        e.t_end = cum * alpha;
        tl.entries.push_back(e);
        if (pauses.enabled && &w != &words.back()) {
            if (w.sentence_final)
                cum += pauses.sentence_s;
            else if (w.comma_final)
                cum += pauses.comma_s;
        }
    }
    tl.speech_end = tl.entries.back().t_end;
    return tl;
}

inline WordTimeline build_timeline(const std::vector<WordToken>& words,
                                   const DurationLexicon& lexicon, const Speed& speed,
                                   const SpeedConfig& cfg = {}, const PauseConfig& pauses = {}) {
    return build_timeline(words, lexicon, cfg.factor(speed), pauses);
}

// Lexicon file: JSON map word -> seconds, with an optional "default_rule"
// object {rate_s_per_char, min_s, max_s}.
inline DurationLexicon parse_lexicon(const std::string& document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError,
                    "lexicon document at byte " + std::to_string(e.byte));
    }
    if (!doc.is_object()) throw Error(ErrorKind::FormatError, "lexicon must be an object");
    DurationLexicon lex;
    for (const auto& [key, val] : doc.items()) {
        if (key == "default_rule") {
            if (!val.is_object()) throw Error(ErrorKind::FormatError, "default_rule");
            if (val.contains("rate_s_per_char")) lex.rate_s_per_char = val["rate_s_per_char"].get<double>();
            if (val.contains("min_s")) lex.min_s = val["min_s"].get<double>();
            if (val.contains("max_s")) lex.max_s = val["max_s"].get<double>();
            continue;
        }
        if (!val.is_number()) throw Error(ErrorKind::FormatError, "entry '" + key + "'");
        lex.overrides[key] = val.get<double>();
    }
    lex.validate();
    return lex;
}

}  // namespace coalign
