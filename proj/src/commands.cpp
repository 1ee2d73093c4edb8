#include "rpgkit/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>

#include "json.hpp"
#include "rpgkit/checker.hpp"
#include "rpgkit/judge.hpp"
#include "rpgkit/report.hpp"
#include "rpgkit/simulation.hpp"
#include "rpgkit/util.hpp"

namespace rpgkit {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::apply_config_file(const std::string& path) {
    json doc = json::parse(read_file(path));
    if (doc.contains("rounds_cap")) rounds_cap = doc["rounds_cap"].get<int>();
    if (doc.contains("temperature")) temperature = doc["temperature"].get<double>();
    if (doc.contains("seed")) seed = doc["seed"].get<uint64_t>();
    if (doc.contains("max_states")) max_states = doc["max_states"].get<uint64_t>();
    if (doc.contains("judge_model")) judge_model = doc["judge_model"].get<std::string>();
    if (doc.contains("max_tokens")) max_tokens = doc["max_tokens"].get<int>();
    if (doc.contains("gc_max_tokens")) gc_max_tokens = doc["gc_max_tokens"].get<int>();
    if (doc.contains("workers")) workers = doc["workers"].get<unsigned>();
    if (doc.contains("base_url")) base_url = doc["base_url"].get<std::string>();
    if (doc.contains("api_key")) api_key = doc["api_key"].get<std::string>();
    if (doc.contains("requests_per_second"))
        requests_per_second = doc["requests_per_second"].get<double>();
}

std::string RunConfig::config_hash() const {
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.4f", temperature);
    json j{{"rounds_cap", rounds_cap}, {"temperature", temp},
           {"seed", seed},             {"max_states", max_states},
           {"judge_model", judge_model}, {"max_tokens", max_tokens},
           {"gc_max_tokens", gc_max_tokens}};
    return to_hex64(fnv1a64(j.dump()));
}

// ---------------------------------------------------------------------------
// BackendSpec

BackendSpec BackendSpec::parse(const std::string& text) {
    BackendSpec spec;
    if (text == "http") {
        spec.kind = Kind::http;
        return spec;
    }
    if (text.rfind("replay:", 0) == 0) {
        spec.kind = Kind::replay;
        spec.path = text.substr(7);
        return spec;
    }
    if (text.rfind("script:", 0) == 0) {
        spec.kind = Kind::script;
        spec.path = text.substr(7);
        return spec;
    }
    throw std::invalid_argument("backend must be 'http', 'replay:<file>' or 'script:<path>', got '" +
                                text + "'");
}

namespace {

// Accepts plain script files ({"response": ...} per line) and trajectory
// files, whose round records replay the raw engine texts in order.
std::vector<std::string> read_script_lines(const std::string& path) {
    std::vector<std::string> out;
    std::string content = read_file(path);
    size_t start = 0;
    int lineno = 0;
    while (start < content.size()) {
        size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (trim(line).empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not JSON");
        if (rec.contains("response")) {
            out.push_back(rec["response"].get<std::string>());
            continue;
        }
        std::string type = rec.value("type", "");
        if (type == "round") out.push_back(rec.at("raw").get<std::string>());
        else if (type.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": script lines must be {\"response\": ...} or trajectory records");
        // header/end/annotation records replay nothing
    }
    return out;
}

}  // namespace

std::unique_ptr<Backend> BackendSpec::open(const RunConfig& cfg, const std::string& item_id) const {
    switch (kind) {
        case Kind::http: {
            HttpBackendConfig http;
            http.base_url = cfg.base_url;
            http.api_key = cfg.api_key;
            http.requests_per_second = cfg.requests_per_second;
            if (http.base_url.empty())
                throw std::runtime_error("http backend needs --base-url or RPGKIT_BASE_URL");
            return std::make_unique<HttpBackend>(std::move(http));
        }
        case Kind::replay:
            return std::make_unique<ReplayBackend>(path);
        case Kind::script: {
            std::string file = path;
            if (fs::is_directory(path)) file = path + "/" + item_id + ".jsonl";
            return std::make_unique<ScriptedBackend>(read_script_lines(file));
        }
    }
    throw std::logic_error("unhandled backend kind");
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

std::vector<fs::path> list_files(const std::string& dir,
                                 const std::vector<std::string>& extensions) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        for (const auto& ext : extensions) {
            if (name.size() > ext.size() &&
                name.compare(name.size() - ext.size(), ext.size(), ext) == 0) {
                out.push_back(entry.path());
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string stem_of(const fs::path& p) {
    std::string name = p.filename().string();
    for (const char* suffix : {".validity.json", ".game.json", ".traj.jsonl", ".raw.txt"}) {
        std::string s = suffix;
        if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0)
            return name.substr(0, name.size() - s.size());
    }
    return p.stem().string();
}

const char* failure_name(FormatReport::Failure f) {
    switch (f) {
        case FormatReport::Failure::none: return "none";
        case FormatReport::Failure::syntax: return "syntax";
        case FormatReport::Failure::schema: return "schema";
        case FormatReport::Failure::no_json: return "no-json";
    }
    return "none";
}

json format_report_json(const FormatReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"path", v.path}, {"message", v.message}});
    return json{{"passed", report.passed},
                {"failure", failure_name(report.failure)},
                {"violations", std::move(violations)}};
}

}  // namespace

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& games_dir, const std::string& out_dir, const RunConfig& cfg) {
    auto all = list_files(games_dir, {".json", ".txt"});
    // a creation output directory holds both <id>.raw.txt and <id>.game.json;
    // validate the raw model output, not the derived clean file
    std::vector<fs::path> files;
    std::set<std::string> raw_stems;
    for (const auto& p : all) {
        std::string name = p.filename().string();
        if (name.size() > 8 && name.compare(name.size() - 8, 8, ".raw.txt") == 0)
            raw_stems.insert(stem_of(p));
    }
    for (const auto& p : all) {
        std::string name = p.filename().string();
        if (name == "create_manifest.json" || name == "gc_summary.json") continue;
        bool derived = name.size() > 10 && name.compare(name.size() - 10, 10, ".game.json") == 0;
        if (derived && raw_stems.count(stem_of(p))) continue;
        files.push_back(p);
    }
    fs::create_directories(out_dir);

    std::mutex log_mu;
    parallel_for_each(files.size(), cfg.workers, [&](size_t i) {
        const fs::path& path = files[i];
        std::string id = stem_of(path);
        json record{{"game_id", id}, {"file", path.filename().string()}};

        std::string text;
        FormatReport format;
        std::optional<GameConfig> game;
        if (!try_read_file(path.string(), text)) {
            format.passed = false;
            format.failure = FormatReport::Failure::syntax;
            format.violations.push_back({"", "unreadable file"});
        } else {
            auto candidate = extract_candidate_json(text);
            if (!candidate) {
                format.passed = false;
                format.failure = FormatReport::Failure::no_json;
                format.violations.push_back({"", "no JSON object found"});
            } else {
                auto parsed = parse_game(*candidate);
                format = std::move(parsed.report);
                game = std::move(parsed.game);
            }
        }
        record["format"] = format_report_json(format);
        if (game) {
            if (game->source) record["source"] = *game->source;
            CheckerConfig checker;
            checker.max_states = cfg.max_states;
            ValidityReport validity = check_validity(*game, checker);
            record["validity"] = validity.to_json();
        }
        write_file(out_dir + "/" + id + ".validity.json", record.dump(2) + "\n");
        std::string status = "format-fail";
        if (format.passed && record.contains("validity"))
            status = record["validity"]["verdict"].get<std::string>();
        std::lock_guard<std::mutex> lock(log_mu);
        std::fprintf(stderr, "validate %-40s %s\n", path.filename().string().c_str(),
                     status.c_str());
    });

    // directory-level summary for quick reading; reports recompute from the
    // per-file records
    auto rows = aggregate_validity_dir(out_dir);
    json summary = json::array();
    for (const auto& r : rows) {
        auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
        summary.push_back({{"label", r.label},
                           {"files", r.files},
                           {"FCR", opt(r.fcr())},
                           {"VCR", opt(r.vcr())},
                           {"w.Success", opt(r.w_success())},
                           {"w.Lose", opt(r.w_lose())},
                           {"Reachability", opt(r.reachability())}});
    }
    write_file(out_dir + "/gc_summary.json", summary.dump(2) + "\n");
    MetricsReport preview;
    preview.gc = rows;
    std::fputs(preview.to_table().c_str(), stdout);
    return 0;
}

// ---------------------------------------------------------------------------
// create

int cmd_create(const std::string& characters_dir, const std::string& model,
               const std::string& examples_dir, const std::string& out_dir,
               const BackendSpec& backend, const RunConfig& cfg) {
    auto characters = list_files(characters_dir, {".txt"});
    if (characters.empty()) {
        std::fprintf(stderr, "no character files (*.txt) in %s\n", characters_dir.c_str());
        return 1;
    }
    auto example_files = list_files(examples_dir, {".json"});
    if (example_files.size() != 5) {
        std::fprintf(stderr, "expected exactly 5 example games in %s, found %zu\n",
                     examples_dir.c_str(), example_files.size());
        return 1;
    }
    CreateGameConfig create_cfg;
    create_cfg.model = model;
    create_cfg.max_tokens = cfg.gc_max_tokens;
    for (const auto& p : example_files) create_cfg.example_games.push_back(read_file(p.string()));

    fs::create_directories(out_dir);
    std::mutex mu;
    json manifest = json::array();

    parallel_for_each(characters.size(), cfg.workers, [&](size_t i) {
        const fs::path& path = characters[i];
        std::string id = stem_of(path);
        auto engine = backend.open(cfg, id);
        auto outcome = create_game(*engine, read_file(path.string()), create_cfg);

        json entry{{"character", id}, {"model", model}};
        write_file(out_dir + "/" + id + ".raw.txt", outcome.raw_text);
        if (outcome.transport_error) {
            entry["status"] = "transport-error";
            entry["error"] = *outcome.transport_error;
        } else if (outcome.game) {
            outcome.game->source = model;
            write_file(out_dir + "/" + id + ".game.json", serialize_game(*outcome.game) + "\n");
            entry["status"] = "ok";
        } else {
            entry["status"] = "format-error";
            entry["format"] = format_report_json(outcome.format);
        }
        std::lock_guard<std::mutex> lock(mu);
        std::fprintf(stderr, "create %-40s %s\n", id.c_str(),
                     entry["status"].get<std::string>().c_str());
        manifest.push_back(std::move(entry));
    });

    std::sort(manifest.begin(), manifest.end(),
              [](const json& a, const json& b) { return a["character"] < b["character"]; });
    write_file(out_dir + "/create_manifest.json", manifest.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& games_dir, const std::string& model,
                 const std::string& out_dir, const BackendSpec& backend, const RunConfig& cfg) {
    auto files = list_files(games_dir, {".json"});
    std::vector<fs::path> game_files;
    for (auto& p : files)
        if (p.filename().string().find(".validity.") == std::string::npos &&
            p.filename() != "create_manifest.json" && p.filename() != "gc_summary.json")
            game_files.push_back(p);
    if (game_files.empty()) {
        std::fprintf(stderr, "no game files in %s\n", games_dir.c_str());
        return 1;
    }
    fs::create_directories(out_dir);

    std::mutex log_mu;
    parallel_for_each(game_files.size(), cfg.workers, [&](size_t i) {
        const fs::path& path = game_files[i];
        std::string id = stem_of(path);
        auto parsed = parse_game(read_file(path.string()));
        if (!parsed.game) {
            std::lock_guard<std::mutex> lock(log_mu);
            std::fprintf(stderr, "simulate %-38s skipped (format check failed)\n", id.c_str());
            return;
        }
        SimulationParams params;
        params.game_id = id;
        params.model = model;
        params.seed = splitmix64(cfg.seed ^ fnv1a64(id));
        params.run_seed = cfg.seed;
        params.rounds_cap = cfg.rounds_cap;
        params.temperature = cfg.temperature;
        params.max_tokens = cfg.max_tokens;
        params.config_hash = cfg.config_hash();

        auto engine = backend.open(cfg, id);
        Trajectory traj = run_simulation(*parsed.game, *engine, params);
        write_trajectory(out_dir + "/" + id + ".traj.jsonl", traj);
        std::lock_guard<std::mutex> lock(log_mu);
        std::fprintf(stderr, "simulate %-38s %zu rounds, %s\n", id.c_str(), traj.rounds.size(),
                     termination_reason_name(traj.termination).c_str());
    });
    return 0;
}

// ---------------------------------------------------------------------------
// judge

int cmd_judge(const std::string& trajectories_dir, const std::string& judge_model,
              const BackendSpec& backend, const RunConfig& cfg) {
    auto files = list_files(trajectories_dir, {".jsonl"});
    std::vector<fs::path> traj_files;
    for (auto& p : files)
        if (p.filename().string().find(".traj.jsonl") != std::string::npos)
            traj_files.push_back(p);
    if (traj_files.empty()) {
        std::fprintf(stderr, "no trajectory files in %s\n", trajectories_dir.c_str());
        return 1;
    }

    int total_failed = 0;
    std::mutex mu;
    parallel_for_each(traj_files.size(), cfg.workers, [&](size_t i) {
        const fs::path& path = traj_files[i];
        std::string id = stem_of(path);
        auto engine = backend.open(cfg, id);
        JudgeClient judge(*engine, judge_model);
        judge.max_tokens = cfg.max_tokens;
        JudgeRunStats stats = judge_trajectory_file(path.string(), judge);
        std::lock_guard<std::mutex> lock(mu);
        total_failed += stats.failed;
        std::fprintf(stderr, "judge %-40s %d annotated, %d skipped, %d failed\n", id.c_str(),
                     stats.annotated, stats.skipped, stats.failed);
    });
    if (total_failed > 0)
        std::fprintf(stderr, "%d judge items failed; rerun to retry them\n", total_failed);
    return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
    MetricsReport report = build_report(run_dir);
    std::string dir = out_dir.empty() ? run_dir + "/reports" : out_dir;
    fs::create_directories(dir);
    write_file(dir + "/report.json", report.to_json().dump(2) + "\n");
    write_file(dir + "/gc.csv", report.gc_csv());
    write_file(dir + "/gs.csv", report.gs_csv());
    write_file(dir + "/difficulty.csv", report.difficulty_csv());
    std::fputs(report.to_table().c_str(), stdout);
    return 0;
}

int cmd_analyze_difficulty(const std::string& validity_dir, const std::string& csv_path) {
    auto rows = aggregate_difficulty(validity_dir);
    MetricsReport report;
    report.difficulty = rows;
    if (!csv_path.empty()) write_file(csv_path, report.difficulty_csv());
    std::fputs(report.to_table().c_str(), stdout);
    return 0;
}

}  // namespace rpgkit
