#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "rpgkit/commands.hpp"

using namespace rpgkit;

namespace {

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& config_file) {
    cmd->add_option("--config", config_file, "JSON config file; its values override flags");
    cmd->add_option("--seed", cfg.seed, "run seed; all randomness derives from it");
    cmd->add_option("--rounds", cfg.rounds_cap, "simulation round cap")->check(CLI::PositiveNumber);
    cmd->add_option("--temperature", cfg.temperature, "engine sampling temperature");
    cmd->add_option("--max-states", cfg.max_states, "state cap for the validity checker");
    cmd->add_option("--max-tokens", cfg.max_tokens, "max output tokens per engine/judge call");
    cmd->add_option("--gc-max-tokens", cfg.gc_max_tokens, "max output tokens for game creation");
    cmd->add_option("--workers", cfg.workers, "parallel worker budget");
    cmd->add_option("--base-url", cfg.base_url, "chat-completions endpoint base URL");
    cmd->add_option("--rps", cfg.requests_per_second, "request budget (requests per second)");
}

void finalize(RunConfig& cfg, const std::string& config_file) {
    if (cfg.base_url.empty())
        if (const char* v = std::getenv("RPGKIT_BASE_URL")) cfg.base_url = v;
    if (const char* v = std::getenv("RPGKIT_API_KEY")) cfg.api_key = v;
    if (!config_file.empty()) cfg.apply_config_file(config_file);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rpgkit: create, verify, simulate and score event-state role-playing games"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file;

    // validate
    std::string games_dir, out_dir;
    auto* validate = app.add_subcommand("validate", "format-check and BFS-validate a directory of games");
    validate->add_option("--games", games_dir, "directory of game files")->required();
    validate->add_option("--out", out_dir, "output directory for validity reports")->required();
    add_common(validate, cfg, config_file);

    // create
    std::string characters_dir, model, examples_dir, backend_text = "http";
    auto* create = app.add_subcommand("create", "create one game per character file via an LLM");
    create->add_option("--characters", characters_dir, "directory of character .txt files")->required();
    create->add_option("--model", model, "engine model id")->required();
    create->add_option("--examples", examples_dir, "directory holding exactly 5 example games")->required();
    create->add_option("--out", out_dir, "output directory")->required();
    create->add_option("--backend", backend_text, "http | replay:<file> | script:<path>");
    add_common(create, cfg, config_file);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run multi-round simulations for each game");
    simulate->add_option("--games", games_dir, "directory of validated game files")->required();
    simulate->add_option("--model", model, "engine model id")->required();
    simulate->add_option("--out", out_dir, "output directory for trajectories")->required();
    simulate->add_option("--backend", backend_text, "http | replay:<file> | script:<path>");
    add_common(simulate, cfg, config_file);

    // judge
    std::string trajectories_dir, judge_model;
    auto* judge = app.add_subcommand("judge", "append judge annotations to trajectories");
    judge->add_option("--trajectories", trajectories_dir, "directory of trajectory files")->required();
    judge->add_option("--judge-model", judge_model, "judge model id");
    judge->add_option("--backend", backend_text, "http | replay:<file> | script:<path>");
    add_common(judge, cfg, config_file);

    // report
    std::string run_dir, report_out;
    auto* report = app.add_subcommand("report", "recompute all metrics from persisted artifacts");
    report->add_option("--run", run_dir, "run directory with validity/ and trajectories/")->required();
    report->add_option("--out", report_out, "report output directory (default <run>/reports)");
    add_common(report, cfg, config_file);

    // analyze-difficulty
    std::string validity_dir, csv_path;
    auto* difficulty = app.add_subcommand("analyze-difficulty",
                                          "difficulty ratios for every valid game");
    difficulty->add_option("--validity", validity_dir, "directory of validity reports")->required();
    difficulty->add_option("--csv", csv_path, "also write a CSV file");
    add_common(difficulty, cfg, config_file);

    CLI11_PARSE(app, argc, argv);

    try {
        finalize(cfg, config_file);
        if (*validate) return cmd_validate(games_dir, out_dir, cfg);
        if (*create)
            return cmd_create(characters_dir, model, examples_dir, out_dir,
                              BackendSpec::parse(backend_text), cfg);
        if (*simulate)
            return cmd_simulate(games_dir, model, out_dir, BackendSpec::parse(backend_text), cfg);
        if (*judge) {
            if (judge_model.empty()) judge_model = cfg.judge_model;
            return cmd_judge(trajectories_dir, judge_model, BackendSpec::parse(backend_text), cfg);
        }
        if (*report) return cmd_report(run_dir, report_out);
        if (*difficulty) return cmd_analyze_difficulty(validity_dir, csv_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
