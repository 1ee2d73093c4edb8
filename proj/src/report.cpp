#include "rpgkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>

#include "rpgkit/simulation.hpp"
#include "rpgkit/util.hpp"

namespace rpgkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<double> ratio(size_t num, size_t den) {
    if (den == 0) return std::nullopt;
    return double(num) / double(den);
}

std::optional<double> mean(const std::vector<double>& xs) {
    if (xs.empty()) return std::nullopt;
    double sum = 0;
    for (double x : xs) sum += x;
    return sum / double(xs.size());
}

std::string fmt(std::optional<double> v, const char* spec = "%.3f") {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, *v);
    return buf;
}

std::string csv_cell(std::optional<double> v, const char* spec = "%.3f") {
    return v ? fmt(v, spec) : std::string();
}

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& suffix) {
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string group_label(const fs::path& file, const std::string& root) {
    fs::path rel = fs::relative(file.parent_path(), root);
    std::string label = rel.string();
    return (label.empty() || label == ".") ? "games" : label;
}

}  // namespace

std::optional<double> GcRow::fcr() const { return ratio(format_pass, files); }
std::optional<double> GcRow::vcr() const { return ratio(valid, files); }
std::optional<double> GcRow::w_success() const { return ratio(with_success, format_pass); }
std::optional<double> GcRow::w_lose() const { return ratio(with_lose, format_pass); }
std::optional<double> GcRow::reachability() const { return ratio(fully_reachable, format_pass); }

std::vector<GcRow> aggregate_validity_dir(const std::string& validity_dir) {
    std::map<std::string, GcRow> groups;
    for (const auto& path : sorted_files(validity_dir, ".validity.json")) {
        json rec = json::parse(read_file(path.string()));
        std::string label = group_label(path, validity_dir);
        GcRow& row = groups[label];
        row.label = label;
        row.files += 1;
        if (!rec.at("format").at("passed").get<bool>()) continue;
        row.format_pass += 1;
        const json& v = rec.at("validity");
        if (v.at("verdict") == "valid") row.valid += 1;
        if (v.at("success_found").get<bool>()) row.with_success += 1;
        if (v.at("lose_found").get<bool>()) row.with_lose += 1;
        if (v.at("unreachable_events").empty()) row.fully_reachable += 1;
    }
    std::vector<GcRow> out;
    for (auto& [_, row] : groups) out.push_back(std::move(row));
    return out;
}

std::vector<DifficultyRow> aggregate_difficulty(const std::string& validity_dir) {
    std::vector<DifficultyRow> out;
    for (const auto& path : sorted_files(validity_dir, ".validity.json")) {
        json rec = json::parse(read_file(path.string()));
        if (!rec.at("format").at("passed").get<bool>()) continue;
        const json& v = rec.at("validity");
        if (v.at("verdict") != "valid") continue;
        const json& cat = v.at("termination_catalog");
        const json& succ = cat.at("success_terminations");
        const json& lose = cat.at("losing_terminations");
        if (succ.empty() || lose.empty()) continue;  // cannot happen for valid games
        double sum_s = 0, sum_l = 0;
        for (const auto& t : succ) sum_s += t.at("depth").get<double>();
        for (const auto& t : lose) sum_l += t.at("depth").get<double>();
        DifficultyRow row;
        row.game_id = rec.value("game_id", path.stem().stem().string());
        row.count_ratio = double(succ.size()) / double(lose.size());
        row.length_ratio = (sum_l / sum_s) * row.count_ratio;
        out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.game_id < b.game_id; });
    return out;
}

std::vector<GsRow> aggregate_trajectories_dir(const std::string& trajectories_dir) {
    struct Accum {
        size_t trajectories = 0;
        std::vector<double> traj_len, traj_act, traj_int, fac, per, perd, mec;
        std::vector<double> round_ece, round_vue;  // flat over all rounds
    };
    std::map<std::string, Accum> models;

    for (const auto& path : sorted_files(trajectories_dir, ".traj.jsonl")) {
        TrajectoryFile f = read_trajectory_file(path.string());
        std::string model = f.header.value("model", "unknown");
        Accum& acc = models[model];
        acc.trajectories += 1;

        size_t rounds = f.rounds.size();
        size_t clean = 0;
        std::vector<double> lens;
        for (const json& r : f.rounds) {
            bool parse_ok = !r.contains("parse_failure");
            const json& errors = r.at("errors");
            bool round_clean = parse_ok && errors.at("event_condition_errors").empty() &&
                               errors.at("variable_update_errors").empty();
            if (round_clean) ++clean;
            if (!parse_ok) continue;  // excluded from ECE/VUE/LEN
            size_t events = errors.at("events_in_round").get<size_t>();
            if (events > 0)
                acc.round_ece.push_back(
                    double(errors.at("event_condition_errors").size()) / double(events));
            size_t vars = errors.at("variables_total").get<size_t>();
            if (vars > 0)
                acc.round_vue.push_back(
                    double(errors.at("variable_update_errors").size()) / double(vars));
            if (r.contains("len_words") && r.at("len_words").is_number())
                lens.push_back(r.at("len_words").get<double>());
        }
        if (rounds > 0) acc.mec.push_back(double(clean) / double(rounds));
        if (auto m = mean(lens)) acc.traj_len.push_back(*m);

        std::vector<double> act_rounds, int_rounds;
        for (const json& a : f.annotations) {
            if (a.at("type") != "annotation") continue;
            std::string metric = a.at("metric").get<std::string>();
            double value = a.at("value").get<double>();
            if (metric == "ACT") act_rounds.push_back(value);
            else if (metric == "INT") int_rounds.push_back(value);
            else if (metric == "FAC") acc.fac.push_back(value);
            else if (metric == "PER") acc.per.push_back(value);
            else if (metric == "PERD") acc.perd.push_back(value);
        }
        if (auto m = mean(act_rounds)) acc.traj_act.push_back(*m);
        if (auto m = mean(int_rounds)) acc.traj_int.push_back(*m);
    }

    std::vector<GsRow> out;
    for (auto& [model, acc] : models) {
        GsRow row;
        row.model = model;
        row.trajectories = acc.trajectories;
        row.len = mean(acc.traj_len);
        row.fac = mean(acc.fac);
        row.per = mean(acc.per);
        row.perd = mean(acc.perd);
        row.act = mean(acc.traj_act);
        row.interestingness = mean(acc.traj_int);
        row.mec = mean(acc.mec);
        row.ece = mean(acc.round_ece);
        row.vue = mean(acc.round_vue);
        out.push_back(std::move(row));
    }
    return out;
}

MetricsReport build_report(const std::string& run_dir) {
    MetricsReport report;
    report.gc = aggregate_validity_dir(run_dir + "/validity");
    report.difficulty = aggregate_difficulty(run_dir + "/validity");
    report.gs = aggregate_trajectories_dir(run_dir + "/trajectories");
    return report;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json MetricsReport::to_json() const {
    json j;
    j["gc"] = json::array();
    for (const auto& r : gc) {
        j["gc"].push_back({{"label", r.label},
                           {"files", r.files},
                           {"FCR", opt_json(r.fcr())},
                           {"VCR", opt_json(r.vcr())},
                           {"w.Success", opt_json(r.w_success())},
                           {"w.Lose", opt_json(r.w_lose())},
                           {"Reachability", opt_json(r.reachability())}});
    }
    j["difficulty"] = json::array();
    for (const auto& r : difficulty)
        j["difficulty"].push_back({{"game_id", r.game_id},
                                   {"CountRatio", r.count_ratio},
                                   {"LengthRatio", r.length_ratio}});
    j["gs"] = json::array();
    for (const auto& r : gs) {
        j["gs"].push_back({{"model", r.model},
                           {"trajectories", r.trajectories},
                           {"LEN", opt_json(r.len)},
                           {"FAC", opt_json(r.fac)},
                           {"PER", opt_json(r.per)},
                           {"PER^d", opt_json(r.perd)},
                           {"ACT", opt_json(r.act)},
                           {"INT", opt_json(r.interestingness)},
                           {"MEC", opt_json(r.mec)},
                           {"ECE", opt_json(r.ece)},
                           {"VUE", opt_json(r.vue)}});
    }
    return j;
}

std::string MetricsReport::gc_csv() const {
    std::string out = "label,files,FCR,VCR,w.Success,w.Lose,Reachability\n";
    for (const auto& r : gc) {
        out += r.label + "," + std::to_string(r.files) + "," + csv_cell(r.fcr()) + "," +
               csv_cell(r.vcr()) + "," + csv_cell(r.w_success()) + "," + csv_cell(r.w_lose()) +
               "," + csv_cell(r.reachability()) + "\n";
    }
    return out;
}

std::string MetricsReport::gs_csv() const {
    std::string out = "model,trajectories,LEN,FAC,PER,PER^d,ACT,INT,MEC,ECE,VUE\n";
    for (const auto& r : gs) {
        out += r.model + "," + std::to_string(r.trajectories) + "," + csv_cell(r.len, "%.1f") +
               "," + csv_cell(r.fac) + "," + csv_cell(r.per) + "," + csv_cell(r.perd) + "," +
               csv_cell(r.act) + "," + csv_cell(r.interestingness) + "," + csv_cell(r.mec) + "," +
               csv_cell(r.ece) + "," + csv_cell(r.vue) + "\n";
    }
    return out;
}

std::string MetricsReport::difficulty_csv() const {
    std::string out = "game_id,CountRatio,LengthRatio\n";
    char buf[64];
    for (const auto& r : difficulty) {
        std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f\n", r.game_id.c_str(), r.count_ratio,
                      r.length_ratio);
        out += buf;
    }
    return out;
}

std::string MetricsReport::to_table() const {
    std::string out;
    char line[256];
    if (!gc.empty()) {
        out += "Game Creation\n";
        std::snprintf(line, sizeof line, "  %-24s %6s %7s %7s %10s %8s %13s\n", "label", "files",
                      "FCR", "VCR", "w.Success", "w.Lose", "Reachability");
        out += line;
        for (const auto& r : gc) {
            std::snprintf(line, sizeof line, "  %-24s %6zu %7s %7s %10s %8s %13s\n",
                          r.label.c_str(), r.files, fmt(r.fcr()).c_str(), fmt(r.vcr()).c_str(),
                          fmt(r.w_success()).c_str(), fmt(r.w_lose()).c_str(),
                          fmt(r.reachability()).c_str());
            out += line;
        }
    }
    if (!difficulty.empty()) {
        out += "\nDifficulty (valid games)\n";
        std::snprintf(line, sizeof line, "  %-32s %11s %12s\n", "game", "CountRatio",
                      "LengthRatio");
        out += line;
        for (const auto& r : difficulty) {
            std::snprintf(line, sizeof line, "  %-32s %11.4f %12.4f\n", r.game_id.c_str(),
                          r.count_ratio, r.length_ratio);
            out += line;
        }
    }
    if (!gs.empty()) {
        out += "\nGame Simulation\n";
        std::snprintf(line, sizeof line, "  %-24s %5s %7s %6s %6s %6s %6s %6s %6s %6s %6s\n",
                      "model", "traj", "LEN", "FAC", "PER", "PER^d", "ACT", "INT", "MEC", "ECE",
                      "VUE");
        out += line;
        for (const auto& r : gs) {
            std::snprintf(line, sizeof line,
                          "  %-24s %5zu %7s %6s %6s %6s %6s %6s %6s %6s %6s\n", r.model.c_str(),
                          r.trajectories, fmt(r.len, "%.1f").c_str(), fmt(r.fac).c_str(),
                          fmt(r.per).c_str(), fmt(r.perd).c_str(), fmt(r.act).c_str(),
                          fmt(r.interestingness).c_str(), fmt(r.mec).c_str(), fmt(r.ece).c_str(),
                          fmt(r.vue).c_str());
            out += line;
        }
    }
    if (out.empty()) out = "(no artifacts found)\n";
    return out;
}

}  // namespace rpgkit
