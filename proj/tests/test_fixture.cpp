#include <doctest.h>

#include <fstream>
#include <sstream>

#include "coalign/coalign.hpp"

using namespace coalign;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kData = COALIGN_TEST_DATA_DIR;

}  // namespace

TEST_CASE("worked phrase end to end: actions align with their words") {
    auto plan = parse_plan(slurp(kData + "/plan_happy.json"));
    auto catalog = parse_catalog(slurp(kData + "/catalog.json"));
    auto store = load_embeddings(slurp(kData + "/embeddings_fixture.txt"));
    auto words = tokenize(plan.speech_text);
    DurationLexicon lexicon;
    auto timeline = build_timeline(words, lexicon, Speed{});
    auto matrix = relevance_matrix(words, plan.all_actions(), store, 0.7);
    AlignConfig config;

    CHECK(validate_plan(plan, catalog).empty());
    auto schedule = solve(plan, timeline, matrix, catalog, config);
    CHECK(check_constraints(schedule, catalog, config, timeline).empty());
    REQUIRE(schedule.entries.size() == 3);

    auto entry = [&](const std::string& id) -> const ScheduleEntry& {
        for (const auto& e : schedule.entries)
            if (e.id == id) return e;
        REQUIRE(false);
        return schedule.entries[0];
    };

    // <hello> within delta of "Happy", <bless> of "New"/"Year", <nod> of the
    // closing word
    CHECK(std::abs(entry("<hello>").start_s - timeline.entries[0].t_start) < config.delta);
    const double bless = entry("<bless>").start_s;
    const bool near_new = std::abs(bless - timeline.entries[1].t_start) < config.delta;
    const bool near_year = std::abs(bless - timeline.entries[2].t_start) < config.delta;
    CHECK((near_new || near_year));
    CHECK(std::abs(entry("<nod>").start_s - timeline.entries[5].t_start) < config.delta);

    // every matched action satisfies the window invariant after simulation
    auto log = simulate(schedule, timeline, &words);
    CHECK(log.events.size() == 2 * (words.size() + schedule.entries.size()));
    for (const auto& e : schedule.entries) {
        if (!e.matched_word_index) continue;
        const double ws = timeline.entries[static_cast<size_t>(*e.matched_word_index)].t_start;
        CHECK(std::abs(e.start_s - ws) < config.delta);
    }

    // gantt output is stable
    auto g1 = render_gantt(log, 60);
    auto g2 = render_gantt(log, 60);
    CHECK(g1 == g2);
}

TEST_CASE("fixture similarities pass the paper threshold exactly where intended") {
    auto store = load_embeddings(slurp(kData + "/embeddings_fixture.txt"));
    auto s = [&](const char* w, const char* a) {
        return cosine(embed_token(store, w), embed_action(store, std::string("<") + a + ">"));
    };
    CHECK(s("happy", "hello") >= 0.7);
    CHECK(s("new", "bless") >= 0.7);
    CHECK(s("year", "bless") >= 0.7);
    CHECK(s("too", "nod") >= 0.7);
    CHECK(s("to", "nod") < 0.7);
    CHECK(s("you", "hello") < 0.7);
    CHECK(s("happy", "wave") < 0.7);
}
