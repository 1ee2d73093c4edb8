#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpgkit/expr.hpp"

namespace rpgkit {

struct Trait {
    double rate = 0;
    std::string description;
};

struct Big5Traits {
    Trait openness, conscientiousness, extraversion, agreeableness, neuroticism;
};

struct NpcDescription {
    std::string text;
    Big5Traits big5;
    std::vector<std::string> additional_facts;
};

struct SceneObject {
    std::string scene_name;
    std::string unique_id;
    std::string background_description;
    std::string scene_type;
};

struct VariableObject {
    std::string value_name;
    std::string unique_id;
    std::string description;
    std::string initial_value;  // numeric-text, kept verbatim for serialization
    std::string min_value;
    std::string max_value;
};

struct EventObject {
    std::string event_name;
    std::string unique_id;
    std::vector<std::string> scene;
    std::vector<std::string> entering_condition;
    std::vector<std::string> succeed_condition;
    std::vector<std::string> succeed_effect;
    std::vector<std::string> fail_effect;
    std::optional<std::string> explanations;

    // compiled forms
    std::vector<ExprAst> entering;
    std::vector<ExprAst> succeed;
    std::vector<EffectStmt> on_success;
    std::vector<EffectStmt> on_fail;
};

struct PreEventCheck {
    std::string check_name;
    std::string unique_id;
    std::string description;
    std::vector<std::string> condition;
    std::vector<std::string> effect;
    std::optional<std::string> explanation;

    std::vector<ExprAst> cond;
    std::vector<EffectStmt> eff;
};

struct GameConfig {
    std::string game_world;
    std::string player_name;
    std::string player_description;
    std::string main_npc_name;
    NpcDescription main_npc_description;
    std::string game_objectives;
    std::vector<SceneObject> scenes;
    std::vector<VariableObject> state_variables;
    std::vector<VariableObject> hidden_variables;
    std::vector<EventObject> events;
    std::vector<PreEventCheck> pre_event_checks;
    std::optional<std::string> source;

    VariableTable vars;  // visible slots first, then hidden

    const EventObject* find_event(std::string_view unique_id) const;
};

struct FormatViolation {
    std::string path;
    std::string message;
};

// passed <=> violations empty.
struct FormatReport {
    enum class Failure { none, syntax, schema, no_json };
    bool passed = true;
    Failure failure = Failure::none;
    std::vector<FormatViolation> violations;
};

struct ParseGameResult {
    std::optional<GameConfig> game;
    FormatReport report;
};

// Strict parse: JSON well-formedness, full schema conformance (required
// fields, no unknown fields, types), plus the semantic rules a playable
// game needs (hidden flags present, unique ids, scene references, numeric
// bounds, parseable expressions). Violations are collected exhaustively.
ParseGameResult parse_game(std::string_view json_text);

// Largest balanced top-level JSON object substring of raw model output
// (code fences and surrounding prose are ignored). nullopt if none.
std::optional<std::string> extract_candidate_json(std::string_view llm_text);

// Every variable at its initial value (bounds hold by construction).
GameState initial_state(const GameConfig& game);

// Canonical serialization; parse_game(serialize_game(g)) reproduces g.
std::string serialize_game(const GameConfig& game);

// The Game Configuration JSON Schema, as shipped in schema/.
const std::string& game_config_schema_json();

}  // namespace rpgkit
