#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "rpgkit/gateway.hpp"

namespace rpgkit {

struct RunConfig {
    int rounds_cap = 10;
    double temperature = 0.2;
    uint64_t seed = 0;
    uint64_t max_states = 10'000'000;
    std::string judge_model = "gpt-4o";
    int max_tokens = 2048;
    int gc_max_tokens = 8192;
    unsigned workers = 1;
    std::string base_url;
    std::string api_key;
    double requests_per_second = 0;

    // Overlays values from a JSON config file; file values win over flags.
    void apply_config_file(const std::string& path);
    std::string config_hash() const;
};

// "http", "replay:<file>" or "script:<file-or-dir>". A script directory
// maps each work item (game id / trajectory id) to "<id>.jsonl"; each line
// of a script file is {"response": "..."} consumed in order.
struct BackendSpec {
    enum class Kind { http, replay, script } kind = Kind::http;
    std::string path;

    static BackendSpec parse(const std::string& text);  // throws std::invalid_argument
    // item_id selects the per-item script when path is a directory.
    std::unique_ptr<Backend> open(const RunConfig& cfg, const std::string& item_id) const;
};

int cmd_validate(const std::string& games_dir, const std::string& out_dir, const RunConfig& cfg);
int cmd_create(const std::string& characters_dir, const std::string& model,
               const std::string& examples_dir, const std::string& out_dir,
               const BackendSpec& backend, const RunConfig& cfg);
int cmd_simulate(const std::string& games_dir, const std::string& model,
                 const std::string& out_dir, const BackendSpec& backend, const RunConfig& cfg);
int cmd_judge(const std::string& trajectories_dir, const std::string& judge_model,
              const BackendSpec& backend, const RunConfig& cfg);
int cmd_report(const std::string& run_dir, const std::string& out_dir);
int cmd_analyze_difficulty(const std::string& validity_dir, const std::string& csv_path);

}  // namespace rpgkit
