#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalign/embedding.hpp"
#include "coalign/plan.hpp"
#include "coalign/scheduler.hpp"
#include "coalign/timeline.hpp"

namespace coalign {

// Seeded random small instances for oracle cross-checking and property
// tests. Sized so that brute-force enumeration stays cheap: at most 4
// actions, 10 words, horizon <= 5 s at the default 0.05 s tick.
struct InstanceParams {
    int max_actions = 4;
    int max_words = 10;
    double min_tau = 0.10, max_tau = 0.40;
    double min_duration = 0.40, max_duration = 1.20;
    double theta = 0.7;
    double conflict_prob = 0.4;
    bool allow_empty_plan = true;
};

struct RandomInstance {
    ExpressionPlan plan;
    ActionCatalog catalog;
    std::vector<WordToken> words;
    WordTimeline timeline;
    RelevanceMatrix matrix;
    AlignConfig config;
};

namespace detail {

// uniform helpers with pinned generation (bit-stable across platforms,
// unlike std::uniform_real_distribution)
inline double runif(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

inline int rint(std::mt19937_64& rng, int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace detail

inline RandomInstance make_random_instance(std::mt19937_64& rng,
                                           const InstanceParams& params = {}) {
    RandomInstance inst;

    // words and timeline
    const int n_words = detail::rint(rng, 1, params.max_words);
    double cum = 0.0;
    for (int i = 0; i < n_words; ++i) {
        WordToken tok;
        tok.surface = "w" + std::to_string(i);
        tok.normalized = tok.surface;
        tok.index = i;
        inst.words.push_back(tok);
        WordTimeline::Entry e;
        e.index = i;
        e.t_start = cum;
        cum += detail::runif(rng, params.min_tau, params.max_tau);
        e.t_end = cum;
        inst.timeline.entries.push_back(e);
    }
    inst.timeline.speech_end = cum;

    // plan and catalog
    const int lo_actions = params.allow_empty_plan ? 0 : 1;
    const int m = detail::rint(rng, lo_actions, params.max_actions);
    inst.plan.speech_text = "synthetic";
    for (int j = 0; j < m; ++j) {
        const std::string id = "<a" + std::to_string(j) + ">";
        ActionInfo info;
        info.duration_s = detail::runif(rng, params.min_duration, params.max_duration);
        info.channel = rng() % 2 == 0 ? Channel::Expression : Channel::Motion;
        inst.catalog.entries[id] = info;
        if (info.channel == Channel::Expression)
            inst.plan.expressions.push_back(id);
        else
            inst.plan.motions.push_back(id);
    }
    if (m >= 2 && detail::runif(rng, 0.0, 1.0) < params.conflict_prob) {
        int a = detail::rint(rng, 0, m - 1);
        int b = detail::rint(rng, 0, m - 1);
        if (a != b) {
            std::string ia = "<a" + std::to_string(std::min(a, b)) + ">";
            std::string ib = "<a" + std::to_string(std::max(a, b)) + ">";
            inst.catalog.conflicts.insert({ia, ib});
        }
    }

    // relevance matrix directly (no embedding table needed)
    const auto ids = inst.plan.all_actions();
    inst.matrix.word_count = static_cast<size_t>(n_words);
    inst.matrix.action_count = ids.size();
    inst.matrix.theta = params.theta;
    inst.matrix.values.resize(inst.matrix.word_count * inst.matrix.action_count, 0.0);
    inst.matrix.mask.resize(inst.matrix.values.size(), 0);
    for (size_t k = 0; k < inst.matrix.values.size(); ++k) {
        double v;
        if (detail::runif(rng, 0.0, 1.0) < 0.4)
            v = detail::runif(rng, params.theta, 1.0);
        else
            v = detail::runif(rng, -1.0, params.theta);
        inst.matrix.values[k] = v;
        inst.matrix.mask[k] = v >= params.theta ? 1 : 0;
    }

    inst.config.delta = 0.05 * detail::rint(rng, 4, 8);  // 0.2 .. 0.4
    inst.config.tick = 0.05;
    inst.config.tail_margin = 1.0;
    inst.config.channel_mode =
        rng() % 2 == 0 ? ChannelMode::PerChannel : ChannelMode::Merged;
    return inst;
}

// Full dump of an instance so a failing case can be replayed as a fixture.
inline nlohmann::json instance_to_json(const RandomInstance& inst) {
    nlohmann::json j;
    j["plan"] = plan_to_json(inst.plan);
    nlohmann::json cat;
    for (const auto& [id, info] : inst.catalog.entries) {
        cat["actions"][id] = {{"duration_s", info.duration_s},
                              {"channel", to_string(info.channel)}};
    }
    cat["conflicts"] = nlohmann::json::array();
    for (const auto& [a, b] : inst.catalog.conflicts)
        cat["conflicts"].push_back(nlohmann::json::array({a, b}));
    j["catalog"] = cat;
    nlohmann::json tl = nlohmann::json::array();
    for (const auto& e : inst.timeline.entries)
        tl.push_back({{"index", e.index}, {"t_start", e.t_start}, {"t_end", e.t_end}});
    j["timeline"] = {{"entries", tl}, {"speech_end", inst.timeline.speech_end}};
    j["matrix"] = {{"word_count", inst.matrix.word_count},
                   {"action_count", inst.matrix.action_count},
                   {"theta", inst.matrix.theta},
                   {"values", inst.matrix.values}};
    j["config"] = {{"delta", inst.config.delta},
                   {"tick", inst.config.tick},
                   {"tail_margin", inst.config.tail_margin},
                   {"channel_mode",
                    inst.config.channel_mode == ChannelMode::Merged ? "merged" : "per-channel"}};
    return j;
}

}  // namespace coalign
