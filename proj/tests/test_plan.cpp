#include <doctest.h>

#include <string>

#include "coalign/plan.hpp"

using namespace coalign;

TEST_CASE("tokenize splits words and flags sentence end") {
    auto toks = tokenize("Happy New Year to you too!");
    REQUIRE(toks.size() == 6);
    CHECK(toks[0].normalized == "happy");
    CHECK(toks[1].normalized == "new");
    CHECK(toks[2].normalized == "year");
    CHECK(toks[3].normalized == "to");
    CHECK(toks[4].normalized == "you");
    CHECK(toks[5].normalized == "too");
    CHECK(toks[5].sentence_final);
    CHECK_FALSE(toks[0].sentence_final);
    for (size_t i = 0; i < toks.size(); ++i) CHECK(toks[i].index == static_cast<int>(i));
}

TEST_CASE("tokenize single word") {
    auto toks = tokenize("Hi");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].normalized == "hi");
    CHECK(toks[0].surface == "Hi");
    CHECK(toks[0].index == 0);
}

TEST_CASE("tokenize rejects punctuation-only text") {
    CHECK_THROWS_AS(tokenize("?!?"), Error);
    try {
        tokenize("?!?");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptySpeech);
    }
}

TEST_CASE("tokenize keeps intra-word apostrophes and hyphens") {
    auto toks = tokenize("don't worry, be well-known.");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].normalized == "don't");
    CHECK(toks[1].normalized == "worry");
    CHECK(toks[1].comma_final);
    CHECK(toks[3].normalized == "well-known");
    CHECK(toks[3].sentence_final);
}

TEST_CASE("tokenize splits at internal punctuation") {
    auto toks = tokenize("hello,world");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].normalized == "hello");
    CHECK(toks[0].comma_final);
    CHECK(toks[1].normalized == "world");
}

TEST_CASE("tokenize is idempotent on normalized output") {
    const std::string texts[] = {"Happy New Year to you too!", "One, two... THREE!?",
                                 "don't stop-me now"};
    for (const auto& text : texts) {
        auto toks = tokenize(text);
        std::string joined;
        for (const auto& t : toks) {
            if (!joined.empty()) joined += ' ';
            joined += t.normalized;
        }
        auto again = tokenize(joined);
        REQUIRE(again.size() == toks.size());
        for (size_t i = 0; i < toks.size(); ++i) CHECK(again[i].normalized == toks[i].normalized);
    }
}

TEST_CASE("parse_plan minimal document") {
    auto plan = parse_plan(R"({"speech_text": "Hi", "expressions": ["<smile>"], "motions": []})");
    CHECK(plan.speech_text == "Hi");
    REQUIRE(plan.expressions.size() == 1);
    CHECK(plan.expressions[0] == "<smile>");
    CHECK(plan.motions.empty());
    CHECK(plan.speed.level == SpeedLevel::Normal);
}

TEST_CASE("parse_plan rejects empty speech") {
    try {
        parse_plan(R"({"speech_text": "  ", "expressions": [], "motions": []})");
        FAIL("expected PlanInvalid");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PlanInvalid);
        CHECK(std::string(e.what()).find("speech_text") != std::string::npos);
    }
}

TEST_CASE("parse_plan rejects malformed action id") {
    try {
        parse_plan(R"({"speech_text": "Hi", "expressions": ["smile"]})");
        FAIL("expected PlanInvalid");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PlanInvalid);
        CHECK(std::string(e.what()).find("expressions[0]") != std::string::npos);
    }
}

TEST_CASE("parse_plan reports byte offset on malformed json") {
    try {
        parse_plan("{\"speech_text\": ");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("plan round-trips through serialization") {
    ExpressionPlan plan;
    plan.speech_text = "Happy New Year to you too!";
    plan.expressions = {"<bless>", "<smile>"};
    plan.motions = {"<hello>"};
    plan.speed.level = SpeedLevel::Fast;
    plan.emotion_label = "joyful";
    auto round = parse_plan(serialize_plan(plan));
    CHECK(round.speech_text == plan.speech_text);
    CHECK(round.expressions == plan.expressions);
    CHECK(round.motions == plan.motions);
    CHECK(round.speed.level == SpeedLevel::Fast);
    CHECK(round.emotion_label == plan.emotion_label);

    plan.speed.multiplier = 1.1;
    auto round2 = parse_plan(serialize_plan(plan));
    REQUIRE(round2.speed.multiplier.has_value());
    CHECK(*round2.speed.multiplier == doctest::Approx(1.1));
}

static ActionCatalog small_catalog() {
    return parse_catalog(R"({
      "actions": {
        "<smile>": {"duration_s": 0.6, "channel": "expression"},
        "<nod>": {"duration_s": 0.8, "channel": "motion"}
      },
      "conflicts": []
    })");
}

TEST_CASE("validate_plan passes catalogued plan") {
    ExpressionPlan plan;
    plan.speech_text = "Hi";
    plan.expressions = {"<smile>"};
    plan.motions = {"<nod>"};
    CHECK(validate_plan(plan, small_catalog()).empty());
}

TEST_CASE("validate_plan flags unknown action") {
    ExpressionPlan plan;
    plan.speech_text = "Hi";
    plan.motions = {"<fly>"};
    auto report = validate_plan(plan, small_catalog());
    REQUIRE(report.size() == 1);
    CHECK(report[0] == "<fly>: unknown action");
}

TEST_CASE("validate_plan flags channel mismatch") {
    ExpressionPlan plan;
    plan.speech_text = "Hi";
    plan.motions = {"<smile>"};  // catalogued as expression
    auto report = validate_plan(plan, small_catalog());
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("channel mismatch") != std::string::npos);
}

TEST_CASE("catalog rejects self-conflicts and unknown conflict ids") {
    CHECK_THROWS_AS(parse_catalog(R"({
      "actions": {"<a>": {"duration_s": 1.0, "channel": "motion"}},
      "conflicts": [["<a>", "<a>"]]
    })"),
                    Error);
    CHECK_THROWS_AS(parse_catalog(R"({
      "actions": {"<a>": {"duration_s": 1.0, "channel": "motion"}},
      "conflicts": [["<a>", "<b>"]]
    })"),
                    Error);
    CHECK_THROWS_AS(parse_catalog(R"({
      "actions": {"<a>": {"duration_s": 0.0, "channel": "motion"}}
    })"),
                    Error);
}
