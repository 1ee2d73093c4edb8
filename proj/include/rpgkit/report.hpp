#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace rpgkit {

// One game-creation group (normally one model), recomputed from the
// per-file validity records.
struct GcRow {
    std::string label;
    size_t files = 0;
    size_t format_pass = 0;
    size_t valid = 0;
    size_t with_success = 0;     // among format-passing games
    size_t with_lose = 0;        // among format-passing games
    size_t fully_reachable = 0;  // among format-passing games

    std::optional<double> fcr() const;
    std::optional<double> vcr() const;
    std::optional<double> w_success() const;
    std::optional<double> w_lose() const;
    std::optional<double> reachability() const;
};

struct GsRow {
    std::string model;
    size_t trajectories = 0;
    std::optional<double> len, fac, per, perd, act, interestingness, mec, ece, vue;
};

struct DifficultyRow {
    std::string game_id;
    double count_ratio = 0;
    double length_ratio = 0;
};

struct MetricsReport {
    std::vector<GcRow> gc;
    std::vector<DifficultyRow> difficulty;
    std::vector<GsRow> gs;

    nlohmann::json to_json() const;
    std::string gc_csv() const;
    std::string gs_csv() const;
    std::string difficulty_csv() const;
    std::string to_table() const;
};

// Pure folds over the persisted artifacts. Missing directories simply
// produce empty sections.
std::vector<GcRow> aggregate_validity_dir(const std::string& validity_dir);
std::vector<DifficultyRow> aggregate_difficulty(const std::string& validity_dir);
std::vector<GsRow> aggregate_trajectories_dir(const std::string& trajectories_dir);

// Scans <run_dir>/validity and <run_dir>/trajectories.
MetricsReport build_report(const std::string& run_dir);

}  // namespace rpgkit
