#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coalign/error.hpp"

namespace coalign {

enum class Channel { Expression, Motion };

inline const char* to_string(Channel c) {
    return c == Channel::Expression ? "expression" : "motion";
}

enum class SpeedLevel { Slow, Normal, Fast };

// Speech-rate setting: a named level or a direct positive multiplier.
struct Speed {
    SpeedLevel level = SpeedLevel::Normal;
    std::optional<double> multiplier;  // overrides level when set
};

// The structured plan an upstream generator emits: speech text plus the
// expression and motion sequences to weave into it.
struct ExpressionPlan {
    std::string speech_text;
    std::vector<std::string> expressions;
    std::vector<std::string> motions;
    Speed speed;
    std::string emotion_label;  // carried through, never interpreted

    // Expressions followed by motions; the canonical action order used by
    // the relevance matrix and the scheduler.
    std::vector<std::string> all_actions() const {
        std::vector<std::string> out = expressions;
        out.insert(out.end(), motions.begin(), motions.end());
        return out;
    }
};

struct WordToken {
    std::string surface;     // original substring, case preserved
    std::string normalized;  // lowercased, punctuation-stripped
    int index = 0;
    bool sentence_final = false;  // followed by . ! or ?
    bool comma_final = false;     // followed by ,
};

struct ActionInfo {
    double duration_s = 0.0;
    Channel channel = Channel::Motion;
};

struct ActionCatalog {
    std::map<std::string, ActionInfo> entries;
    std::set<std::pair<std::string, std::string>> conflicts;  // stored with first < second

    bool has(const std::string& id) const { return entries.count(id) != 0; }

    bool in_conflict(const std::string& a, const std::string& b) const {
        auto p = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        return conflicts.count(p) != 0;
    }
};

// ---------------------------------------------------------------------------
// action ids

inline bool is_valid_action_id(const std::string& id) {
    if (id.size() < 3 || id.front() != '<' || id.back() != '>') return false;
    for (size_t i = 1; i + 1 < id.size(); ++i) {
        char c = id[i];
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// tokenization

namespace detail {

inline bool is_ascii_space(unsigned char c) { return std::isspace(c) != 0; }

// Word characters: ASCII alphanumerics plus any non-ASCII byte (UTF-8
// passthrough). Apostrophes and hyphens count only between word characters.
inline bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

inline std::string ascii_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

// Splits speech text into word tokens: whitespace-separated chunks, further
// split at punctuation, with intra-word apostrophes/hyphens kept. Trailing
// punctuation sets the sentence_final / comma_final flags.
inline std::vector<WordToken> tokenize(const std::string& text) {
    std::vector<WordToken> tokens;
    const size_t n = text.size();
    size_t i = 0;
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (detail::is_ascii_space(c)) {
            ++i;
            continue;
        }
        if (detail::is_word_char(c)) {
            size_t start = i;
            while (i < n) {
                unsigned char cur = static_cast<unsigned char>(text[i]);
                if (detail::is_word_char(cur)) {
                    ++i;
                } else if ((cur == '\'' || cur == '-') && i > start && i + 1 < n &&
                           detail::is_word_char(static_cast<unsigned char>(text[i + 1]))) {
                    ++i;
                } else {
                    break;
                }
            }
            WordToken tok;
            tok.surface = text.substr(start, i - start);
            tok.normalized = detail::ascii_lower(tok.surface);
            tok.index = static_cast<int>(tokens.size());
            tokens.push_back(std::move(tok));
        } else {
            // punctuation run: attach flags to the preceding token
            if (!tokens.empty()) {
                if (c == '.' || c == '!' || c == '?') tokens.back().sentence_final = true;
                if (c == ',') tokens.back().comma_final = true;
            }
            ++i;
        }
    }
    if (tokens.empty()) throw Error(ErrorKind::EmptySpeech, "no words after normalization");
    return tokens;
}

// ---------------------------------------------------------------------------
// plan parsing

namespace detail {

inline Speed parse_speed(const nlohmann::json& j) {
    Speed s;
    if (j.is_string()) {
        const std::string v = j.get<std::string>();
        if (v == "slow")
            s.level = SpeedLevel::Slow;
        else if (v == "normal")
            s.level = SpeedLevel::Normal;
        else if (v == "fast")
            s.level = SpeedLevel::Fast;
        else
            throw Error(ErrorKind::PlanInvalid, "speed");
    } else if (j.is_number()) {
        double m = j.get<double>();
        if (!(m > 0.0)) throw Error(ErrorKind::PlanInvalid, "speed");
        s.multiplier = m;
    } else {
        throw Error(ErrorKind::PlanInvalid, "speed");
    }
    return s;
}

inline std::string trimmed(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && is_ascii_space(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && is_ascii_space(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline void check_action_list(const nlohmann::json& arr, const char* field,
                              std::vector<std::string>& out) {
    if (!arr.is_array()) throw Error(ErrorKind::PlanInvalid, field);
    size_t idx = 0;
    for (const auto& e : arr) {
        if (!e.is_string() || !is_valid_action_id(e.get<std::string>()))
            throw Error(ErrorKind::PlanInvalid,
                        std::string(field) + "[" + std::to_string(idx) + "]");
        out.push_back(e.get<std::string>());
        ++idx;
    }
}

}  // namespace detail

inline ExpressionPlan plan_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::PlanInvalid, "document");
    ExpressionPlan plan;
    if (!doc.contains("speech_text") || !doc["speech_text"].is_string())
        throw Error(ErrorKind::PlanInvalid, "speech_text");
    plan.speech_text = doc["speech_text"].get<std::string>();
    if (detail::trimmed(plan.speech_text).empty())
        throw Error(ErrorKind::PlanInvalid, "speech_text");
    if (doc.contains("expressions"))
        detail::check_action_list(doc["expressions"], "expressions", plan.expressions);
    if (doc.contains("motions"))
        detail::check_action_list(doc["motions"], "motions", plan.motions);
    if (doc.contains("speed")) plan.speed = detail::parse_speed(doc["speed"]);
    if (doc.contains("emotion")) {
        if (!doc["emotion"].is_string()) throw Error(ErrorKind::PlanInvalid, "emotion");
        plan.emotion_label = doc["emotion"].get<std::string>();
    }
    return plan;
}

inline ExpressionPlan parse_plan(const std::string& document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError,
                    "plan document at byte " + std::to_string(e.byte));
    }
    return plan_from_json(doc);
}

inline nlohmann::json plan_to_json(const ExpressionPlan& plan) {
    nlohmann::json j;
    j["speech_text"] = plan.speech_text;
    j["expressions"] = plan.expressions;
    j["motions"] = plan.motions;
    if (plan.speed.multiplier) {
        j["speed"] = *plan.speed.multiplier;
    } else {
        switch (plan.speed.level) {
            case SpeedLevel::Slow: j["speed"] = "slow"; break;
            case SpeedLevel::Normal: j["speed"] = "normal"; break;
            case SpeedLevel::Fast: j["speed"] = "fast"; break;
        }
    }
    j["emotion"] = plan.emotion_label;
    return j;
}

inline std::string serialize_plan(const ExpressionPlan& plan) {
    return plan_to_json(plan).dump(2);
}

// ---------------------------------------------------------------------------
// catalog parsing

inline ActionCatalog catalog_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("actions") || !doc["actions"].is_object())
        throw Error(ErrorKind::PlanInvalid, "actions");
    ActionCatalog cat;
    for (const auto& [id, spec] : doc["actions"].items()) {
        if (!is_valid_action_id(id))
            throw Error(ErrorKind::PlanInvalid, "actions." + id);
        ActionInfo info;
        if (!spec.is_object() || !spec.contains("duration_s") || !spec["duration_s"].is_number())
            throw Error(ErrorKind::PlanInvalid, "actions." + id + ".duration_s");
        info.duration_s = spec["duration_s"].get<double>();
        if (!(info.duration_s > 0.0))
            throw Error(ErrorKind::PlanInvalid, "actions." + id + ".duration_s");
        if (!spec.contains("channel") || !spec["channel"].is_string())
            throw Error(ErrorKind::PlanInvalid, "actions." + id + ".channel");
        const std::string ch = spec["channel"].get<std::string>();
        if (ch == "expression")
            info.channel = Channel::Expression;
        else if (ch == "motion")
            info.channel = Channel::Motion;
        else
            throw Error(ErrorKind::PlanInvalid, "actions." + id + ".channel");
        cat.entries[id] = info;
    }
    if (doc.contains("conflicts")) {
        if (!doc["conflicts"].is_array()) throw Error(ErrorKind::PlanInvalid, "conflicts");
        size_t idx = 0;
        for (const auto& pair : doc["conflicts"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
                !pair[1].is_string())
                throw Error(ErrorKind::PlanInvalid,
                            "conflicts[" + std::to_string(idx) + "]");
            std::string a = pair[0].get<std::string>();
            std::string b = pair[1].get<std::string>();
            if (a == b || !cat.has(a) || !cat.has(b))
                throw Error(ErrorKind::PlanInvalid,
                            "conflicts[" + std::to_string(idx) + "]");
            if (b < a) std::swap(a, b);
            cat.conflicts.insert({a, b});
            ++idx;
        }
    }
    return cat;
}

inline ActionCatalog parse_catalog(const std::string& document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError,
                    "catalog document at byte " + std::to_string(e.byte));
    }
    return catalog_from_json(doc);
}

// ---------------------------------------------------------------------------
// validation

// Report-based check that every plan action exists in the catalog on the
// right channel. Empty report <=> plan is executable.
inline std::vector<std::string> validate_plan(const ExpressionPlan& plan,
                                              const ActionCatalog& catalog) {
    std::vector<std::string> report;
    auto check = [&](const std::vector<std::string>& ids, Channel expected) {
        for (const auto& id : ids) {
            auto it = catalog.entries.find(id);
            if (it == catalog.entries.end()) {
                report.push_back(id + ": unknown action");
            } else if (it->second.channel != expected) {
                report.push_back(id + ": channel mismatch (catalogued as " +
                                 std::string(to_string(it->second.channel)) + ", used as " +
                                 std::string(to_string(expected)) + ")");
            }
        }
    };
    check(plan.expressions, Channel::Expression);
    check(plan.motions, Channel::Motion);
    return report;
}

}  // namespace coalign
