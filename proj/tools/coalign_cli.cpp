// Command-line front end: plan alignment, oracle self-check, corpus dedup
// and INT4 quantization over the documented file formats.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coalign/coalign.hpp"

namespace {

using namespace coalign;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error(ErrorKind::MissingInput, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// all output is composed in memory and written once, so a failure never
// leaves a partial file behind
void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.good()) throw Error(ErrorKind::MissingInput, "cannot open " + path);
    out << contents;
}

bool parse_on_off(const std::string& v) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw CLI::ValidationError("expected on|off, got '" + v + "'");
}

struct AlignOptions {
    std::string plan_path, catalog_path, embeddings_path, lexicon_path, out_path;
    double theta = 0.7;
    AlignConfig config;
    std::string channel_mode = "per-channel";
    std::string modal_sync = "on", context_map = "on", temporal_plan = "on";
    std::string speed_override;
    std::string format = "json";
    int gantt_width = 80;
    bool pauses = false;
};

int run_align(const AlignOptions& opt) {
    auto plan = parse_plan(slurp(opt.plan_path));
    auto catalog = parse_catalog(slurp(opt.catalog_path));
    auto store = load_embeddings(slurp(opt.embeddings_path));
    DurationLexicon lexicon;
    if (!opt.lexicon_path.empty()) lexicon = parse_lexicon(slurp(opt.lexicon_path));

    if (!opt.speed_override.empty()) {
        Speed s;
        if (opt.speed_override == "slow")
            s.level = SpeedLevel::Slow;
        else if (opt.speed_override == "normal")
            s.level = SpeedLevel::Normal;
        else if (opt.speed_override == "fast")
            s.level = SpeedLevel::Fast;
        else
            s.multiplier = std::stod(opt.speed_override);
        plan.speed = s;
    }

    AlignConfig config = opt.config;
    config.channel_mode =
        opt.channel_mode == "merged" ? ChannelMode::Merged : ChannelMode::PerChannel;
    config.modal_sync = parse_on_off(opt.modal_sync);
    config.context_map = parse_on_off(opt.context_map);
    config.temporal_plan = parse_on_off(opt.temporal_plan);
    config.validate();

    auto report = validate_plan(plan, catalog);
    if (!report.empty()) {
        std::string detail;
        for (const auto& r : report) detail += r + "; ";
        throw Error(ErrorKind::PlanInvalid, detail);
    }

    auto words = tokenize(plan.speech_text);
    PauseConfig pauses;
    pauses.enabled = opt.pauses;
    auto timeline = build_timeline(words, lexicon, plan.speed, SpeedConfig{}, pauses);
    auto matrix = relevance_matrix(words, plan.all_actions(), store, opt.theta);
    auto schedule = solve(plan, timeline, matrix, catalog, config);
    auto log = simulate(schedule, timeline, &words);

    nlohmann::json out = schedule_to_json(schedule, &words);
    out["meta"] = {{"theta", opt.theta},
                   {"delta", config.delta},
                   {"tick", config.tick},
                   {"tail_margin", config.tail_margin},
                   {"channel_mode", opt.channel_mode},
                   {"modal_sync", config.modal_sync},
                   {"context_map", config.context_map},
                   {"temporal_plan", config.temporal_plan},
                   {"speed_factor", SpeedConfig{}.factor(plan.speed)}};
    out["events"] = event_log_to_json(log);

    const std::string json_text = out.dump(2) + "\n";
    const std::string gantt_text = render_gantt(log, opt.gantt_width);

    if (opt.format == "json") {
        if (opt.out_path.empty())
            std::cout << json_text;
        else
            write_file(opt.out_path, json_text);
    } else if (opt.format == "gantt") {
        if (opt.out_path.empty())
            std::cout << gantt_text;
        else
            write_file(opt.out_path, gantt_text);
    } else {  // both
        if (opt.out_path.empty()) {
            std::cout << json_text << gantt_text;
        } else {
            write_file(opt.out_path, json_text);
            std::cout << gantt_text;
        }
    }
    return 0;
}

int run_oracle_check(int n, uint64_t seed, const std::string& dump_path) {
    std::mt19937_64 rng(seed);
    for (int t = 0; t < n; ++t) {
        auto inst = make_random_instance(rng);
        bool solve_ok = true, oracle_ok = true;
        Schedule a, b;
        try {
            a = solve(inst.plan, inst.timeline, inst.matrix, inst.catalog, inst.config);
        } catch (const Error&) {
            solve_ok = false;
        }
        try {
            b = brute_force_solve(inst.plan, inst.timeline, inst.matrix, inst.catalog,
                                  inst.config);
        } catch (const Error&) {
            oracle_ok = false;
        }
        bool match = solve_ok == oracle_ok;
        if (match && solve_ok) {
            match = a.objective == b.objective && a.entries.size() == b.entries.size();
            for (size_t j = 0; match && j < a.entries.size(); ++j)
                match = a.entries[j].start_tick == b.entries[j].start_tick;
        }
        if (!match) {
            nlohmann::json dump = instance_to_json(inst);
            dump["instance_index"] = t;
            dump["seed"] = seed;
            if (solve_ok) dump["solve"] = schedule_to_json(a);
            if (oracle_ok) dump["oracle"] = schedule_to_json(b);
            write_file(dump_path, dump.dump(2) + "\n");
            std::cerr << "mismatch at instance " << t << ", dumped to " << dump_path << "\n";
            return 1;
        }
    }
    std::cout << "oracle-check: " << n << " instances, all matched\n";
    return 0;
}

std::vector<std::string> read_corpus(const std::string& path) {
    const std::string raw = slurp(path);
    size_t first = raw.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && raw[first] == '[') {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::ParseError, "corpus at byte " + std::to_string(e.byte));
        }
        if (!arr.is_array()) throw Error(ErrorKind::FormatError, "corpus must be an array");
        std::vector<std::string> docs;
        for (const auto& d : arr) {
            if (!d.is_string()) throw Error(ErrorKind::FormatError, "corpus entries must be strings");
            docs.push_back(d.get<std::string>());
        }
        return docs;
    }
    std::vector<std::string> docs;
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) docs.push_back(line);
    while (!docs.empty() && docs.back().empty()) docs.pop_back();
    return docs;
}

int run_dedup(const std::string& input, int threshold, const std::string& out_path) {
    auto docs = read_corpus(input);
    auto res = dedup_corpus(docs, threshold);
    std::ostringstream out;
    out << "retained_indices=";
    for (size_t i = 0; i < res.retained.size(); ++i)
        out << (i ? " " : "") << res.retained[i];
    out << "\n";
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.4f", res.duplication_rate);
    out << "duplication_rate=" << rate << "\n";
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    return 0;
}

std::vector<double> read_values(const std::string& path) {
    const std::string raw = slurp(path);
    size_t first = raw.find_first_not_of(" \t\r\n");
    std::vector<double> values;
    if (first != std::string::npos && raw[first] == '[') {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::ParseError, "values at byte " + std::to_string(e.byte));
        }
        for (const auto& v : arr) {
            if (!v.is_number()) throw Error(ErrorKind::FormatError, "values must be numbers");
            values.push_back(v.get<double>());
        }
        return values;
    }
    std::istringstream in(raw);
    double x;
    while (in >> x) values.push_back(x);
    if (!in.eof()) throw Error(ErrorKind::FormatError, "non-numeric content in " + path);
    return values;
}

int run_quantize(const std::string& input, double delta_flag, const std::string& out_path) {
    auto values = read_values(input);
    QuantSpec spec;
    spec.delta = delta_flag > 0.0 ? delta_flag : absmax_delta(values);
    auto q = quantize_int4(values, spec);
    std::ostringstream out;
    out << "delta=" << spec.delta << "\n";
    for (double v : q) out << v << "\n";
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"co-speech action alignment toolkit"};
    app.require_subcommand(1);

    AlignOptions aopt;
    auto* align = app.add_subcommand("align", "schedule plan actions against speech");
    align->add_option("--plan", aopt.plan_path, "plan JSON file")->required();
    align->add_option("--catalog", aopt.catalog_path, "action catalog JSON file")->required();
    align->add_option("--embeddings", aopt.embeddings_path, "embedding table (text or EMB1)")
        ->required();
    align->add_option("--lexicon", aopt.lexicon_path, "duration lexicon JSON file");
    align->add_option("--theta", aopt.theta, "relevance threshold");
    align->add_option("--delta", aopt.config.delta, "alignment window seconds");
    align->add_option("--tick", aopt.config.tick, "grid resolution seconds");
    align->add_option("--tail-margin", aopt.config.tail_margin, "seconds past speech end");
    align->add_option("--speed", aopt.speed_override, "slow|normal|fast or multiplier");
    align->add_option("--channel-mode", aopt.channel_mode, "per-channel|merged")
        ->check(CLI::IsMember({"per-channel", "merged"}));
    align->add_option("--modal-sync", aopt.modal_sync, "on|off");
    align->add_option("--context-map", aopt.context_map, "on|off");
    align->add_option("--temporal-plan", aopt.temporal_plan, "on|off");
    align->add_option("--out", aopt.out_path, "output path (default stdout)");
    align->add_option("--format", aopt.format, "json|gantt|both")
        ->check(CLI::IsMember({"json", "gantt", "both"}));
    align->add_option("--gantt-width", aopt.gantt_width, "gantt columns");
    align->add_flag("--pauses", aopt.pauses, "insert punctuation pauses");

    int n = 1000;
    uint64_t seed = 42;
    std::string dump_path = "counterexample.json";
    auto* oracle = app.add_subcommand("oracle-check", "cross-check solver vs brute force");
    oracle->add_option("--n", n, "number of random instances");
    oracle->add_option("--seed", seed, "rng seed");
    oracle->add_option("--dump", dump_path, "counterexample output path");

    std::string dd_input, dd_out;
    int dd_threshold = 3;
    auto* dedup = app.add_subcommand("dedup", "simhash near-duplicate filtering");
    dedup->add_option("--input", dd_input, "corpus (one doc per line or JSON array)")->required();
    dedup->add_option("--threshold", dd_threshold, "hamming radius 0..64");
    dedup->add_option("--out", dd_out, "output path (default stdout)");

    std::string qt_input, qt_out;
    double qt_delta = 0.0;
    auto* quantize = app.add_subcommand("quantize", "INT4 absmax quantization");
    quantize->add_option("--input", qt_input, "values (whitespace-separated or JSON array)")
        ->required();
    quantize->add_option("--delta", qt_delta, "quantization step (default absmax/7)");
    quantize->add_option("--out", qt_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (align->parsed()) return run_align(aopt);
        if (oracle->parsed()) return run_oracle_check(n, seed, dump_path);
        if (dedup->parsed()) return run_dedup(dd_input, dd_threshold, dd_out);
        if (quantize->parsed()) return run_quantize(qt_input, qt_delta, qt_out);
    } catch (const coalign::Error& e) {
        std::cerr << "error: kind=" << to_string(e.kind()) << " code=" << e.exit_code()
                  << " detail=" << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: kind=Internal code=9 detail=" << e.what() << "\n";
        return 9;
    }
    return 0;
}
