// Exercises the installed CLI end to end via std::system.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kBin = COALIGN_CLI_BIN;
const std::string kData = COALIGN_TEST_DATA_DIR;
const std::string kWork = COALIGN_CLI_WORK_DIR;

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

std::string fixture_args() {
    return "--plan " + kData + "/plan_happy.json --catalog " + kData +
           "/catalog.json --embeddings " + kData + "/embeddings_fixture.txt";
}

}  // namespace

TEST_CASE("align writes a schedule aligned with the fixture phrase") {
    const std::string out = kWork + "/schedule.json";
    std::remove(out.c_str());
    REQUIRE(run("align " + fixture_args() + " --out " + out) == 0);
    auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["meta"]["theta"] == 0.7);
    CHECK(doc["meta"]["delta"] == 0.3);
    bool hello_seen = false;
    for (const auto& a : doc["actions"]) {
        if (a["id"] == "<hello>") {
            hello_seen = true;
            CHECK(std::abs(a["start_s"].get<double>() - 0.0) < 0.3);
            CHECK(a["matched_word"] == "Happy");
        }
    }
    CHECK(hello_seen);
}

TEST_CASE("align with missing catalog exits with MissingInput and no output") {
    const std::string out = kWork + "/missing_case.json";
    std::remove(out.c_str());
    const int code = run("align --plan " + kData + "/plan_happy.json --catalog " + kData +
                         "/nope.json --embeddings " + kData + "/embeddings_fixture.txt --out " +
                         out);
    CHECK(code == 2);
    CHECK_FALSE(exists(out));
}

TEST_CASE("greedy run scores at most the optimal run") {
    const std::string opt_out = kWork + "/opt.json";
    const std::string greedy_out = kWork + "/greedy.json";
    REQUIRE(run("align " + fixture_args() + " --out " + opt_out) == 0);
    REQUIRE(run("align " + fixture_args() + " --temporal-plan off --out " + greedy_out) == 0);
    auto opt = nlohmann::json::parse(slurp(opt_out));
    auto greedy = nlohmann::json::parse(slurp(greedy_out));
    CHECK(greedy["objective"].get<double>() <= opt["objective"].get<double>() + 1e-12);
}

TEST_CASE("gantt format emits three lanes") {
    const std::string out = kWork + "/chart.txt";
    REQUIRE(run("align " + fixture_args() + " --format gantt --out " + out) == 0);
    auto text = slurp(out);
    CHECK(text.find("speech") != std::string::npos);
    CHECK(text.find("expression") != std::string::npos);
    CHECK(text.find("motion") != std::string::npos);
}

TEST_CASE("oracle-check passes on seeded instances") {
    CHECK(run("oracle-check --n 50 --seed 42 --dump " + kWork + "/cex.json") == 0);
    CHECK(run("oracle-check --n 0") == 0);
}

TEST_CASE("dedup reports retained indices and rate") {
    const std::string in = kWork + "/corpus.txt";
    {
        std::ofstream f(in);
        f << "alpha beta gamma\nalpha beta gamma\nsomething else entirely\n";
    }
    const std::string out = kWork + "/dedup.txt";
    REQUIRE(run("dedup --input " + in + " --threshold 3 --out " + out) == 0);
    auto text = slurp(out);
    CHECK(text.find("retained_indices=0 2") != std::string::npos);
    CHECK(text.find("duplication_rate=0.3333") != std::string::npos);
}

TEST_CASE("dedup of empty corpus") {
    const std::string in = kWork + "/empty.txt";
    {
        std::ofstream f(in);
    }
    const std::string out = kWork + "/dedup_empty.txt";
    REQUIRE(run("dedup --input " + in + " --out " + out) == 0);
    auto text = slurp(out);
    CHECK(text.find("retained_indices=\n") != std::string::npos);
    CHECK(text.find("duplication_rate=0.0000") != std::string::npos);
}

TEST_CASE("quantize applies the rounding formula") {
    const std::string in = kWork + "/values.txt";
    {
        std::ofstream f(in);
        f << "0.26\n";
    }
    const std::string out = kWork + "/quant.txt";
    REQUIRE(run("quantize --input " + in + " --delta 0.1 --out " + out) == 0);
    auto text = slurp(out);
    CHECK(text.find("delta=0.1") != std::string::npos);
    CHECK(text.find("0.3") != std::string::npos);
}

TEST_CASE("quantize rejects non-numeric input") {
    const std::string in = kWork + "/garbage.txt";
    {
        std::ofstream f(in);
        f << "not a number\n";
    }
    CHECK(run("quantize --input " + in) == 3);
}
