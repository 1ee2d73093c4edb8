#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rpgkit/checker.hpp"
#include "rpgkit/game.hpp"
#include "rpgkit/gateway.hpp"

namespace rpgkit {

enum class PlanPhase { start, end };
enum class PlanOutcome { success, failure };

struct EventPlanEntry {
    std::string event_id;
    PlanPhase phase = PlanPhase::start;
    std::optional<PlanOutcome> outcome;  // present exactly when phase == end
};

struct RoundOutput {
    std::vector<EventPlanEntry> event_plan;
    std::string narration;  // without the trailing action array
    std::array<std::string, 3> candidate_actions;
    std::map<std::string, std::string> reported_state;  // id or value_name -> numeric text
};

struct RoundParseFailure {
    std::string section;  // plan | narration | actions | state
    std::string reason;
};

// Engine rounds arrive as three labeled fenced blocks:
//
//   ```EVENT PLAN
//   [{"event_id": "E001", "phase": "start"},
//    {"event_id": "E001", "phase": "end", "outcome": "success"}]
//   ```
//   ```NARRATION
//   free text, ending with a JSON array of exactly three action strings
//   ["look around", "talk to the keeper", "leave"]
//   ```
//   ```GAME STATE
//   {"V001": "1", "H001": "0", "H002": "0"}
//   ```
//
// Anything outside the three blocks is ignored.
std::variant<RoundOutput, RoundParseFailure> parse_round_output(std::string_view text);

// Plan entries must reference declared events.
std::optional<RoundParseFailure> validate_round_output(const RoundOutput& out,
                                                       const GameConfig& game);

enum class EventErrorKind { bad_entry, bad_outcome };

struct EventConditionError {
    std::string event_id;
    EventErrorKind kind;
};

struct RoundErrors {
    std::vector<EventConditionError> event_condition_errors;
    std::vector<std::string> variable_update_errors;  // unique_ids
    size_t events_in_round = 0;
    size_t variables_total = 0;

    bool clean() const {
        return event_condition_errors.empty() && variable_update_errors.empty();
    }
};

struct PlanWalk {
    GameState state;  // post-check expected state
    std::vector<EventConditionError> errors;
    TerminationKind termination = TerminationKind::none;
};

// Deterministic ground truth for one round: walk the plan in order over the
// previous expected state (start entries check the entering condition, end
// entries check the claimed outcome and apply the claimed effect), then run
// the pre-event checks. `open_events` carries started-but-unfinished events
// across rounds and is updated in place. The engine's own reported state is
// never consulted.
PlanWalk expected_state_after(const GameState& prev, std::span<const EventPlanEntry> plan,
                              const GameConfig& game, std::set<std::string>& open_events);

// Variables whose reported value differs from the expected state; a missing
// variable counts as incorrect. Hidden variables are included.
std::vector<std::string> check_variable_updates(const GameState& expected,
                                                const std::map<std::string, std::string>& reported,
                                                const GameConfig& game);

// Uniform over {0,1,2}; a pure function of (seed, round_index).
struct RandomPlayer {
    uint64_t seed = 0;
    int choose(int round_index) const;
};

size_t narration_length(std::string_view narration);

struct RoundRecord {
    int index = 0;
    std::string raw;
    std::optional<RoundOutput> output;
    std::optional<RoundParseFailure> parse_failure;
    GameState expected_state;
    RoundErrors errors;
    int chosen_action_index = -1;        // -1: no action taken this round
    std::optional<size_t> len_words;     // absent when the round did not parse

    bool has_errors() const { return parse_failure.has_value() || !errors.clean(); }
};

enum class TerminationReason { game_success, game_lose, round_cap, engine_failure };

std::string termination_reason_name(TerminationReason r);

struct Trajectory {
    std::string game_id;
    std::string model;
    uint64_t seed = 0;      // per-game seed, derived from run_seed
    uint64_t run_seed = 0;  // the one seed the whole run funnels through
    int rounds_cap = 10;
    double temperature = 0.2;
    std::string config_hash;
    nlohmann::json game_json;  // full game definition, for self-contained scoring
    std::vector<RoundRecord> rounds;
    TerminationReason termination = TerminationReason::round_cap;
    std::optional<std::string> engine_error;
};

struct SimulationParams {
    std::string game_id;
    std::string model;
    uint64_t seed = 0;
    uint64_t run_seed = 0;
    int rounds_cap = 10;
    double temperature = 0.2;
    int max_tokens = 2048;
    std::string config_hash;
};

// The system context sent once before round 1: the full game definition
// plus the round output instructions.
std::string build_gs_system_prompt(const GameConfig& game);

// Multi-round simulation loop against any backend. Engine failures keep
// the rounds recorded so far.
Trajectory run_simulation(const GameConfig& game, Backend& engine, const SimulationParams& p);

// ---------------------------------------------------------------------------
// Persistence: one JSONL file per trajectory. A header record leads,
// followed by one record per round, one end record, and any appended
// annotation records (see judge.hpp).

std::string trajectory_to_jsonl(const Trajectory& t);
void write_trajectory(const std::string& path, const Trajectory& t);

struct TrajectoryFile {
    nlohmann::json header;
    std::vector<nlohmann::json> rounds;
    nlohmann::json end;  // null when the file is truncated
    std::vector<nlohmann::json> annotations;
};

TrajectoryFile read_trajectory_file(const std::string& path);

}  // namespace rpgkit
