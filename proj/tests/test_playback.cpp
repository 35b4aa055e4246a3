#include <doctest.h>

#include "coalign/playback.hpp"

using namespace coalign;

namespace {

WordTimeline six_word_timeline() {
    WordTimeline tl;
    const double starts[] = {0.0, 0.40, 0.64, 0.96, 1.12, 1.36};
    const double ends[] = {0.40, 0.64, 0.96, 1.12, 1.36, 1.60};
    for (int i = 0; i < 6; ++i) tl.entries.push_back({i, starts[i], ends[i]});
    tl.speech_end = 1.60;
    return tl;
}

Schedule three_action_schedule() {
    Schedule s;
    s.tick = 0.05;
    s.horizon = 2.6;
    s.entries.push_back({"<bless>", Channel::Expression, 0.35, 1.0, 2, 0.94, 7});
    s.entries.push_back({"<hello>", Channel::Motion, 0.0, 1.2, 0, 0.8, 0});
    s.entries.push_back({"<nod>", Channel::Motion, 1.2, 0.8, 5, 0.75, 24});
    return s;
}

}  // namespace

TEST_CASE("simulate emits two events per word and action") {
    auto log = simulate(three_action_schedule(), six_word_timeline());
    CHECK(log.events.size() == 18);
    for (size_t i = 1; i < log.events.size(); ++i)
        CHECK(log.events[i - 1].t <= log.events[i].t);
    CHECK(log.total_duration == doctest::Approx(2.0));  // <nod> ends at 1.2 + 0.8
}

TEST_CASE("simulate with empty schedule") {
    WordTimeline tl;
    tl.entries.push_back({0, 0.0, 0.5});
    tl.speech_end = 0.5;
    Schedule s;
    s.horizon = 1.5;
    auto log = simulate(s, tl);
    CHECK(log.events.size() == 2);
    CHECK(log.events[0].kind == EventKind::WordStart);
    CHECK(log.events[1].kind == EventKind::WordEnd);
}

TEST_CASE("simulate rejects overlapping chained actions") {
    auto s = three_action_schedule();
    s.entries[2].start_s = 0.5;  // overlaps <hello> on the motion channel
    try {
        simulate(s, six_word_timeline());
        FAIL("expected ConstraintViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConstraintViolation);
    }
}

TEST_CASE("action starts have matching ends at start + duration") {
    auto log = simulate(three_action_schedule(), six_word_timeline());
    for (const auto& e : log.events) {
        if (e.kind != EventKind::ActionStart) continue;
        bool found = false;
        for (const auto& f : log.events) {
            if (f.kind == EventKind::ActionEnd && f.id == e.id && f.t > e.t) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("render_gantt is deterministic and proportional") {
    WordTimeline tl;
    tl.entries.push_back({0, 0.0, 1.0});
    tl.speech_end = 1.0;
    Schedule s;
    s.horizon = 2.0;
    s.entries.push_back({"<a>", Channel::Motion, 0.0, 2.0, std::nullopt, 0.0, 0});
    auto log = simulate(s, tl);
    REQUIRE(log.total_duration == 2.0);
    auto text = render_gantt(log, 20);  // 10 columns per second
    auto text2 = render_gantt(log, 20);
    CHECK(text == text2);
    // the speech lane holds a 10-column bar for the 1 s word
    auto lane_start = text.find("speech     [");
    REQUIRE(lane_start != std::string::npos);
    std::string lane = text.substr(lane_start + 12, 20);
    CHECK(lane.substr(0, 10).find('.') == std::string::npos);
    CHECK(lane.substr(10) == "..........");
}

TEST_CASE("render_gantt on empty log") {
    EventLog log;
    auto text = render_gantt(log, 24);
    CHECK(text.find("speech") != std::string::npos);
    CHECK(text.find("expression") != std::string::npos);
    CHECK(text.find("motion") != std::string::npos);
    CHECK_THROWS_AS(render_gantt(log, 10), Error);
}
