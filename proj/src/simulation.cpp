#include "rpgkit/simulation.hpp"

#include <cctype>
#include <sstream>

#include "rpgkit/util.hpp"

namespace rpgkit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Round parsing

namespace {

std::string normalize_label(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) || c == '_') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(char(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

// First fenced block carrying each known label; prose and foreign fences
// are skipped.
std::map<std::string, std::string> fenced_blocks(std::string_view text) {
    std::map<std::string, std::string> blocks;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string label, body;
    bool in_block = false;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!in_block) {
            if (t.rfind("```", 0) == 0 && t.size() > 3) {
                label = normalize_label(t.substr(3));
                body.clear();
                in_block = true;
            }
            continue;
        }
        if (t == "```") {
            if (!label.empty() && !blocks.count(label)) blocks[label] = body;
            in_block = false;
            continue;
        }
        body += line;
        body.push_back('\n');
    }
    return blocks;
}

std::optional<std::string> json_value_to_numeric_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
        return std::string(buf);
    }
    if (v.is_boolean()) return std::string(v.get<bool>() ? "1" : "0");
    return std::nullopt;
}

}  // namespace

std::variant<RoundOutput, RoundParseFailure> parse_round_output(std::string_view text) {
    auto blocks = fenced_blocks(text);
    auto fail = [](std::string section, std::string reason) {
        return RoundParseFailure{std::move(section), std::move(reason)};
    };

    auto plan_it = blocks.find("EVENT PLAN");
    if (plan_it == blocks.end()) return fail("plan", "missing EVENT PLAN block");
    auto narration_it = blocks.find("NARRATION");
    if (narration_it == blocks.end()) return fail("narration", "missing NARRATION block");
    auto state_it = blocks.find("GAME STATE");
    if (state_it == blocks.end()) return fail("state", "missing GAME STATE block");

    RoundOutput out;

    // EVENT PLAN
    json plan = json::parse(plan_it->second, nullptr, false);
    if (plan.is_discarded() || !plan.is_array())
        return fail("plan", "EVENT PLAN must be a JSON array");
    for (const auto& entry : plan) {
        if (!entry.is_object() || !entry.contains("event_id") || !entry["event_id"].is_string() ||
            !entry.contains("phase") || !entry["phase"].is_string())
            return fail("plan", "plan entries need string event_id and phase");
        EventPlanEntry e;
        e.event_id = entry["event_id"].get<std::string>();
        std::string phase = entry["phase"].get<std::string>();
        if (phase == "start") e.phase = PlanPhase::start;
        else if (phase == "end") e.phase = PlanPhase::end;
        else return fail("plan", "phase must be 'start' or 'end', got '" + phase + "'");

        bool has_outcome = entry.contains("outcome") && !entry["outcome"].is_null();
        if (e.phase == PlanPhase::end) {
            if (!has_outcome || !entry["outcome"].is_string())
                return fail("plan", "end entries need an outcome");
            std::string o = entry["outcome"].get<std::string>();
            if (o == "success") e.outcome = PlanOutcome::success;
            else if (o == "failure") e.outcome = PlanOutcome::failure;
            else return fail("plan", "outcome must be 'success' or 'failure', got '" + o + "'");
        } else if (has_outcome) {
            return fail("plan", "start entries must not carry an outcome");
        }
        out.event_plan.push_back(std::move(e));
    }

    // NARRATION: free text ending with a JSON array of exactly 3 strings
    std::string narration = narration_it->second;
    size_t end = narration.find_last_not_of(" \t\r\n");
    if (end == std::string::npos || narration[end] != ']')
        return fail("actions", "narration must end with a JSON array of candidate actions");
    narration.resize(end + 1);
    json actions;
    size_t open = std::string::npos;
    for (size_t pos = narration.rfind('['); pos != std::string::npos;
         pos = pos == 0 ? std::string::npos : narration.rfind('[', pos - 1)) {
        json probe = json::parse(narration.substr(pos), nullptr, false);
        if (!probe.is_discarded() && probe.is_array()) {
            actions = std::move(probe);
            open = pos;
            break;
        }
        if (pos == 0) break;
    }
    if (open == std::string::npos)
        return fail("actions", "no parseable action array at the end of the narration");
    if (actions.size() != 3)
        return fail("actions", "expected exactly 3 candidate actions, got " +
                                   std::to_string(actions.size()));
    for (size_t i = 0; i < 3; ++i) {
        if (!actions[i].is_string()) return fail("actions", "candidate actions must be strings");
        out.candidate_actions[i] = actions[i].get<std::string>();
    }
    out.narration = trim(narration.substr(0, open));

    // GAME STATE
    json state = json::parse(state_it->second, nullptr, false);
    if (state.is_discarded() || !state.is_object())
        return fail("state", "GAME STATE must be a JSON object");
    for (auto it = state.begin(); it != state.end(); ++it) {
        auto text_value = json_value_to_numeric_text(it.value());
        if (!text_value)
            return fail("state", "variable '" + it.key() + "' must map to a number or string");
        out.reported_state[it.key()] = *text_value;
    }

    return out;
}

std::optional<RoundParseFailure> validate_round_output(const RoundOutput& out,
                                                       const GameConfig& game) {
    for (const auto& e : out.event_plan)
        if (!game.find_event(e.event_id))
            return RoundParseFailure{"plan", "unknown event id '" + e.event_id + "'"};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mechanic checking

PlanWalk expected_state_after(const GameState& prev, std::span<const EventPlanEntry> plan,
                              const GameConfig& game, std::set<std::string>& open_events) {
    PlanWalk walk{prev, {}, TerminationKind::none};
    GameState working = prev;

    for (const auto& entry : plan) {
        const EventObject* ev = game.find_event(entry.event_id);
        if (!ev) {  // callers validate; kept as an error for robustness
            walk.errors.push_back({entry.event_id, EventErrorKind::bad_entry});
            continue;
        }
        if (entry.phase == PlanPhase::start) {
            bool ok = false;
            try {
                ok = eval_condition(ev->entering, working);
            } catch (const EvalError&) {
                ok = false;
            }
            if (!ok) walk.errors.push_back({entry.event_id, EventErrorKind::bad_entry});
            open_events.insert(entry.event_id);
            continue;
        }

        // end entry: one error at most, entry errors take precedence
        bool flagged = false;
        if (!open_events.count(entry.event_id)) {
            walk.errors.push_back({entry.event_id, EventErrorKind::bad_entry});
            flagged = true;
        }
        bool claimed_success = entry.outcome == PlanOutcome::success;
        try {
            bool expected_success = eval_condition(ev->succeed, working);
            if (!flagged && expected_success != claimed_success) {
                walk.errors.push_back({entry.event_id, EventErrorKind::bad_outcome});
                flagged = true;
            }
            working = apply_effects(claimed_success ? ev->on_success : ev->on_fail, working,
                                    game.vars);
        } catch (const EvalError&) {
            if (!flagged)
                walk.errors.push_back({entry.event_id, EventErrorKind::bad_outcome});
            // state unchanged for this entry
        }
        open_events.erase(entry.event_id);
    }

    auto [kind, settled] = classify_termination(game, working);
    walk.termination = kind;
    walk.state = std::move(settled);
    return walk;
}

std::vector<std::string> check_variable_updates(const GameState& expected,
                                                const std::map<std::string, std::string>& reported,
                                                const GameConfig& game) {
    std::vector<std::string> wrong;
    for (size_t i = 0; i < game.vars.size(); ++i) {
        const auto& slot = game.vars.slot(int(i));
        const std::string* text = nullptr;
        if (auto it = reported.find(slot.value_name); it != reported.end()) text = &it->second;
        else if (auto it2 = reported.find(slot.unique_id); it2 != reported.end()) text = &it2->second;
        if (!text) {
            wrong.push_back(slot.unique_id);
            continue;
        }
        auto value = Fixed::parse(*text);
        if (!value || value->raw() != expected.value(int(i)).raw())
            wrong.push_back(slot.unique_id);
    }
    return wrong;
}

int RandomPlayer::choose(int round_index) const {
    uint64_t mixed = splitmix64(seed + 0x9e3779b97f4a7c15ull * uint64_t(round_index + 1));
    return int(mixed % 3);
}

size_t narration_length(std::string_view narration) { return count_words(narration); }

// ---------------------------------------------------------------------------
// Simulation loop

namespace {

const char* kBeginInstruction = "Begin the game now. Output round 1.";
const char* kContinueInstruction = "Continue.";

}  // namespace

std::string build_gs_system_prompt(const GameConfig& game) {
    std::string prompt;
    prompt +=
        "You are the game engine for a text role-playing game. Run the game below strictly "
        "according to its rules, playing the main NPC and narrating the world.\n\n"
        "GAME DEFINITION (JSON):\n";
    prompt += serialize_game(game);
    prompt +=
        "\n\n"
        "Each round, reply with exactly three fenced blocks and nothing else:\n"
        "\n"
        "```EVENT PLAN\n"
        "[{\"event_id\": \"...\", \"phase\": \"start\"},\n"
        " {\"event_id\": \"...\", \"phase\": \"end\", \"outcome\": \"success\"}]\n"
        "```\n"
        "A JSON array of the events occurring this round, in order. Each entry has "
        "\"phase\": \"start\" or \"end\"; end entries also carry \"outcome\": \"success\" or "
        "\"failure\". Use [] when no event occurs.\n"
        "\n"
        "```NARRATION\n"
        "The story for this round, preferably in play-script form, under 200 words. End the "
        "block with a JSON array of exactly three candidate actions for the player.\n"
        "[\"first action\", \"second action\", \"third action\"]\n"
        "```\n"
        "\n"
        "```GAME STATE\n"
        "{\"variable_id\": \"value\", ...}\n"
        "```\n"
        "Every state variable and hidden variable with its current numeric value after this "
        "round's effects.\n"
        "\n"
        "Rules:\n"
        "- Only start an event whose entering condition holds in the current state.\n"
        "- End an event with outcome \"success\" exactly when its succeed_condition holds; "
        "apply succeed_effect on success and fail_effect on failure.\n"
        "- Track every variable, including hidden ones, and keep values inside their declared "
        "bounds.\n"
        "- The pre_event_checks decide termination; once has_succeeded or has_failed is set, "
        "the game is over.\n";
    return prompt;
}

Trajectory run_simulation(const GameConfig& game, Backend& engine, const SimulationParams& p) {
    Trajectory traj;
    traj.game_id = p.game_id;
    traj.model = p.model;
    traj.seed = p.seed;
    traj.run_seed = p.run_seed;
    traj.rounds_cap = p.rounds_cap;
    traj.temperature = p.temperature;
    traj.config_hash = p.config_hash;
    traj.game_json = json::parse(serialize_game(game));
    traj.termination = TerminationReason::round_cap;

    RandomPlayer player{p.seed};
    std::vector<ChatMessage> messages;
    messages.push_back({"system", build_gs_system_prompt(game)});
    messages.push_back({"user", kBeginInstruction});

    GameState prev = initial_state(game);
    std::set<std::string> open_events;

    for (int round = 0; round < p.rounds_cap; ++round) {
        ChatRequest req;
        req.model = p.model;
        req.temperature = p.temperature;
        req.max_tokens = p.max_tokens;
        req.messages = messages;

        std::string text;
        try {
            text = engine.chat(req);
        } catch (const std::exception& e) {
            traj.termination = TerminationReason::engine_failure;
            traj.engine_error = e.what();
            return traj;
        }
        messages.push_back({"assistant", text});

        RoundRecord rec;
        rec.index = round;
        rec.raw = text;

        auto parsed = parse_round_output(text);
        if (auto* failure = std::get_if<RoundParseFailure>(&parsed)) {
            rec.parse_failure = *failure;
        } else {
            auto& output = std::get<RoundOutput>(parsed);
            if (auto bad = validate_round_output(output, game)) rec.parse_failure = *bad;
            else rec.output = std::move(output);
        }

        std::span<const EventPlanEntry> plan;
        if (rec.output) plan = rec.output->event_plan;
        PlanWalk walk = expected_state_after(prev, plan, game, open_events);
        rec.expected_state = walk.state;
        rec.errors.event_condition_errors = std::move(walk.errors);
        rec.errors.events_in_round = plan.size();
        rec.errors.variables_total = game.vars.size();
        if (rec.output) {
            rec.errors.variable_update_errors =
                check_variable_updates(walk.state, rec.output->reported_state, game);
            rec.len_words = narration_length(rec.output->narration);
        }
        prev = walk.state;

        if (walk.termination != TerminationKind::none) {
            traj.rounds.push_back(std::move(rec));
            traj.termination = walk.termination == TerminationKind::success
                                   ? TerminationReason::game_success
                                   : TerminationReason::game_lose;
            return traj;
        }

        if (rec.output) {
            int idx = player.choose(round);
            rec.chosen_action_index = idx;
            messages.push_back({"user", rec.output->candidate_actions[size_t(idx)]});
        } else {
            messages.push_back({"user", kContinueInstruction});
        }
        traj.rounds.push_back(std::move(rec));
    }
    traj.termination = TerminationReason::round_cap;
    return traj;
}

// ---------------------------------------------------------------------------
// Persistence

std::string termination_reason_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::game_success: return "game-success";
        case TerminationReason::game_lose: return "game-lose";
        case TerminationReason::round_cap: return "round-cap";
        case TerminationReason::engine_failure: return "engine-failure";
    }
    return "round-cap";
}

namespace {

json state_to_json(const GameState& s, const GameConfig& game) {
    json out = json::object();
    for (size_t i = 0; i < game.vars.size(); ++i)
        out[game.vars.slot(int(i)).unique_id] = s.value(int(i)).to_string();
    return out;
}

json round_to_json(const RoundRecord& r, const GameConfig& game) {
    json j;
    j["type"] = "round";
    j["index"] = r.index;
    j["raw"] = r.raw;
    if (r.parse_failure)
        j["parse_failure"] = {{"section", r.parse_failure->section},
                              {"reason", r.parse_failure->reason}};
    if (r.output) {
        json plan = json::array();
        for (const auto& e : r.output->event_plan) {
            json je{{"event_id", e.event_id},
                    {"phase", e.phase == PlanPhase::start ? "start" : "end"}};
            if (e.outcome)
                je["outcome"] = *e.outcome == PlanOutcome::success ? "success" : "failure";
            plan.push_back(std::move(je));
        }
        j["event_plan"] = std::move(plan);
        j["narration"] = r.output->narration;
        j["candidate_actions"] = r.output->candidate_actions;
        j["reported_state"] = r.output->reported_state;
    }
    j["expected_state"] = state_to_json(r.expected_state, game);
    json errors;
    errors["event_condition_errors"] = json::array();
    for (const auto& e : r.errors.event_condition_errors)
        errors["event_condition_errors"].push_back(
            {{"event_id", e.event_id},
             {"kind", e.kind == EventErrorKind::bad_entry ? "bad-entry" : "bad-outcome"}});
    errors["variable_update_errors"] = r.errors.variable_update_errors;
    errors["events_in_round"] = r.errors.events_in_round;
    errors["variables_total"] = r.errors.variables_total;
    j["errors"] = std::move(errors);
    if (r.chosen_action_index >= 0) j["chosen_action_index"] = r.chosen_action_index;
    else j["chosen_action_index"] = nullptr;
    if (r.len_words) j["len_words"] = *r.len_words;
    else j["len_words"] = nullptr;
    return j;
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& t) {
    auto parsed = parse_game(t.game_json.dump());
    if (!parsed.game) throw std::runtime_error("trajectory carries an invalid game definition");
    const GameConfig& game = *parsed.game;

    std::string out;
    json header{{"type", "header"},       {"game_id", t.game_id},
                {"model", t.model},       {"seed", t.seed},
                {"run_seed", t.run_seed}, {"rounds_cap", t.rounds_cap},
                {"temperature", t.temperature}, {"config_hash", t.config_hash},
                {"game", t.game_json}};
    out += header.dump();
    out.push_back('\n');
    for (const auto& r : t.rounds) {
        out += round_to_json(r, game).dump();
        out.push_back('\n');
    }
    json end{{"type", "end"},
             {"termination", termination_reason_name(t.termination)},
             {"rounds", t.rounds.size()}};
    if (t.engine_error) end["engine_error"] = *t.engine_error;
    out += end.dump();
    out.push_back('\n');
    return out;
}

void write_trajectory(const std::string& path, const Trajectory& t) {
    write_file(path, trajectory_to_jsonl(t));
}

TrajectoryFile read_trajectory_file(const std::string& path) {
    TrajectoryFile f;
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
        if (rec.is_discarded() || !rec.contains("type"))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad record");
        std::string type = rec["type"].get<std::string>();
        if (type == "header") f.header = std::move(rec);
        else if (type == "round") f.rounds.push_back(std::move(rec));
        else if (type == "end") f.end = std::move(rec);
        else if (type == "annotation" || type == "annotation_error")
            f.annotations.push_back(std::move(rec));
        else throw std::runtime_error(path + ": unknown record type '" + type + "'");
    }
    if (f.header.is_null()) throw std::runtime_error(path + ": missing header record");
    return f;
}

}  // namespace rpgkit
