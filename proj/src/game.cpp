#include "rpgkit/game.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "rpgkit/schema.hpp"
#include "rpgkit/util.hpp"

namespace rpgkit {

using nlohmann::json;

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    static const std::unordered_set<std::string_view> keywords = {"true", "false", "and", "or",
                                                                  "not"};
    return !keywords.count(s);
}

struct Collector {
    std::vector<FormatViolation>* out;
    void add(std::string path, std::string message) {
        out->push_back({std::move(path), std::move(message)});
    }
};

Trait parse_trait(const json& j) {
    return Trait{j.at("rate").get<double>(), j.at("description").get<std::string>()};
}

VariableObject parse_variable(const json& j) {
    VariableObject v;
    v.value_name = j.at("value_name").get<std::string>();
    v.unique_id = j.at("unique_id").get<std::string>();
    v.description = j.at("description").get<std::string>();
    v.initial_value = j.value("initial_value", std::string());
    v.min_value = j.at("min_value").get<std::string>();
    v.max_value = j.at("max_value").get<std::string>();
    return v;
}

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    for (const auto& s : j) out.push_back(s.get<std::string>());
    return out;
}

// Compiles a list of condition strings, collecting per-string violations.
std::vector<ExprAst> compile_conditions(const std::vector<std::string>& texts,
                                        const VariableTable& vars, const std::string& path,
                                        Collector& c) {
    std::vector<ExprAst> out;
    for (size_t i = 0; i < texts.size(); ++i) {
        try {
            out.push_back(parse_condition(texts[i], vars));
        } catch (const ResolveError& e) {
            c.add(path + "/" + std::to_string(i), e.what());
        } catch (const DslParseError& e) {
            c.add(path + "/" + std::to_string(i),
                  std::string(e.what()) + " at position " + std::to_string(e.position));
        }
    }
    return out;
}

std::vector<EffectStmt> compile_effects(const std::vector<std::string>& texts,
                                        const VariableTable& vars, const std::string& path,
                                        Collector& c) {
    std::vector<EffectStmt> out;
    for (size_t i = 0; i < texts.size(); ++i) {
        try {
            out.push_back(parse_effect(texts[i], vars));
        } catch (const ResolveError& e) {
            c.add(path + "/" + std::to_string(i), e.what());
        } catch (const DslParseError& e) {
            c.add(path + "/" + std::to_string(i),
                  std::string(e.what()) + " at position " + std::to_string(e.position));
        }
    }
    return out;
}

}  // namespace

const EventObject* GameConfig::find_event(std::string_view unique_id) const {
    for (const auto& e : events)
        if (e.unique_id == unique_id) return &e;
    return nullptr;
}

const std::string& game_config_schema_json() {
    static const std::string text = R"json({
  "title": "Game Configuration",
  "type": "object",
  "required": [
    "game_world",
    "player_name",
    "player_description",
    "main_npc_name",
    "main_npc_description",
    "game_objectives",
    "scenes",
    "state_variables",
    "hidden_variables",
    "events",
    "pre_event_checks"
  ],
  "properties": {
    "game_world": { "type": "string" },
    "player_name": { "type": "string" },
    "player_description": { "type": "string" },
    "main_npc_name": { "type": "string" },
    "main_npc_description": {
      "type": "object",
      "required": [ "text", "big5_personality_traits", "additional_facts" ],
      "properties": {
        "text": { "type": "string" },
        "big5_personality_traits": { "$ref": "#/$defs/big5_traits" },
        "additional_facts": { "type": "array", "items": { "type": "string" } }
      },
      "additionalProperties": false
    },
    "game_objectives": { "type": "string" },
    "scenes": { "type": "array", "items": { "$ref": "#/$defs/scene_object" } },
    "state_variables": { "type": "array", "items": { "$ref": "#/$defs/variable_object" } },
    "hidden_variables": {
      "type": "array",
      "minItems": 2,
      "items": { "$ref": "#/$defs/variable_object" },
      "contains": { "properties": { "value_name": { "enum": [ "has_succeeded", "has_failed" ] } } }
    },
    "events": { "type": "array", "items": { "$ref": "#/$defs/event_object" } },
    "pre_event_checks": { "type": "array", "items": { "$ref": "#/$defs/pre_event_check_object" } },
    "source": { "type": "string" }
  },
  "additionalProperties": false,
  "$defs": {
    "trait": {
      "type": "object",
      "required": [ "rate", "description" ],
      "properties": {
        "rate": { "type": "number" },
        "description": { "type": "string" }
      },
      "additionalProperties": false
    },
    "big5_traits": {
      "type": "object",
      "required": [
        "openness",
        "conscientiousness",
        "extraversion",
        "agreeableness",
        "neuroticism"
      ],
      "properties": {
        "openness": { "$ref": "#/$defs/trait" },
        "conscientiousness": { "$ref": "#/$defs/trait" },
        "extraversion": { "$ref": "#/$defs/trait" },
        "agreeableness": { "$ref": "#/$defs/trait" },
        "neuroticism": { "$ref": "#/$defs/trait" }
      },
      "additionalProperties": false
    },
    "scene_object": {
      "type": "object",
      "required": [ "scene_name", "unique_id", "background_description", "scene_type" ],
      "properties": {
        "scene_name": { "type": "string" },
        "unique_id": { "type": "string" },
        "background_description": { "type": "string" },
        "scene_type": { "type": "string" }
      },
      "additionalProperties": false
    },
    "variable_object": {
      "type": "object",
      "required": [ "value_name", "unique_id", "description", "min_value", "max_value" ],
      "properties": {
        "value_name": { "type": "string" },
        "unique_id": { "type": "string" },
        "description": { "type": "string" },
        "initial_value": { "type": "string" },
        "min_value": { "type": "string" },
        "max_value": { "type": "string" }
      },
      "additionalProperties": false
    },
    "event_object": {
      "type": "object",
      "required": [ "event_name", "unique_id", "scene", "entering_condition", "succeed_condition", "succeed_effect", "fail_effect" ],
      "properties": {
        "event_name": { "type": "string" },
        "unique_id": { "type": "string" },
        "scene": { "type": "array", "items": { "type": "string" } },
        "entering_condition": { "type": "array", "items": { "type": "string" } },
        "succeed_condition": { "type": "array", "items": { "type": "string" } },
        "succeed_effect": { "type": "array", "items": { "type": "string" } },
        "fail_effect": { "type": "array", "items": { "type": "string" } },
        "explanations": { "type": "string" }
      },
      "additionalProperties": false
    },
    "pre_event_check_object": {
      "type": "object",
      "required": [ "check_name", "unique_id", "description", "condition", "effect" ],
      "properties": {
        "check_name": { "type": "string" },
        "unique_id": { "type": "string" },
        "description": { "type": "string" },
        "condition": { "type": "array", "items": { "type": "string" } },
        "effect": { "type": "array", "items": { "type": "string" } },
        "explanation": { "type": "string" }
      },
      "additionalProperties": false
    }
  }
})json";
    return text;
}

ParseGameResult parse_game(std::string_view json_text) {
    ParseGameResult result;

    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) {
        result.report.passed = false;
        result.report.failure = FormatReport::Failure::syntax;
        result.report.violations.push_back({"", "input is not well-formed JSON"});
        return result;
    }

    static const json schema = json::parse(game_config_schema_json());
    auto violations = schema_validate(schema, doc);
    if (!violations.empty()) {
        result.report.passed = false;
        result.report.failure = FormatReport::Failure::schema;
        result.report.violations = std::move(violations);
        return result;
    }

    // Shape is right; build the config and run the semantic checks,
    // collecting every violation before giving a verdict.
    Collector c{&result.report.violations};
    GameConfig g;
    g.game_world = doc.at("game_world").get<std::string>();
    g.player_name = doc.at("player_name").get<std::string>();
    g.player_description = doc.at("player_description").get<std::string>();
    g.main_npc_name = doc.at("main_npc_name").get<std::string>();
    g.game_objectives = doc.at("game_objectives").get<std::string>();
    if (doc.contains("source")) g.source = doc["source"].get<std::string>();

    const json& npc = doc.at("main_npc_description");
    g.main_npc_description.text = npc.at("text").get<std::string>();
    g.main_npc_description.additional_facts = string_list(npc.at("additional_facts"));
    const json& traits = npc.at("big5_personality_traits");
    g.main_npc_description.big5.openness = parse_trait(traits.at("openness"));
    g.main_npc_description.big5.conscientiousness = parse_trait(traits.at("conscientiousness"));
    g.main_npc_description.big5.extraversion = parse_trait(traits.at("extraversion"));
    g.main_npc_description.big5.agreeableness = parse_trait(traits.at("agreeableness"));
    g.main_npc_description.big5.neuroticism = parse_trait(traits.at("neuroticism"));

    for (const auto& s : doc.at("scenes")) {
        g.scenes.push_back(SceneObject{
            s.at("scene_name").get<std::string>(),
            s.at("unique_id").get<std::string>(),
            s.at("background_description").get<std::string>(),
            s.at("scene_type").get<std::string>(),
        });
    }
    for (const auto& v : doc.at("state_variables")) g.state_variables.push_back(parse_variable(v));
    for (const auto& v : doc.at("hidden_variables")) g.hidden_variables.push_back(parse_variable(v));

    // Global unique_id uniqueness across scenes, variables, events, checks.
    std::unordered_map<std::string, std::string> id_owner;
    auto claim_id = [&](const std::string& id, const std::string& path, const char* what) {
        if (id.empty()) {
            c.add(path, std::string(what) + " unique_id is empty");
            return;
        }
        auto [it, inserted] = id_owner.emplace(id, path);
        if (!inserted)
            c.add(path, "unique_id '" + id + "' already used at " + it->second);
    };
    for (size_t i = 0; i < g.scenes.size(); ++i)
        claim_id(g.scenes[i].unique_id, "/scenes/" + std::to_string(i) + "/unique_id", "scene");

    // Variable table: visible slots first, then hidden; names resolve by
    // value_name or unique_id, ambiguity is a format violation.
    auto add_variables = [&](const std::vector<VariableObject>& list, bool hidden,
                             const std::string& base) {
        for (size_t i = 0; i < list.size(); ++i) {
            const auto& v = list[i];
            const std::string path = base + "/" + std::to_string(i);
            claim_id(v.unique_id, path + "/unique_id", "variable");

            if (!is_identifier(v.value_name))
                c.add(path + "/value_name",
                      "value_name '" + v.value_name + "' is not usable as an identifier");
            if (!v.unique_id.empty() && !is_identifier(v.unique_id))
                c.add(path + "/unique_id",
                      "unique_id '" + v.unique_id + "' is not usable as an identifier");

            auto initial = Fixed::parse(v.initial_value);
            auto lo = Fixed::parse(v.min_value);
            auto hi = Fixed::parse(v.max_value);
            if (v.initial_value.empty())
                c.add(path + "/initial_value", "required property is missing");
            else if (!initial)
                c.add(path + "/initial_value", "not a decimal number: '" + v.initial_value + "'");
            if (!lo) c.add(path + "/min_value", "not a decimal number: '" + v.min_value + "'");
            if (!hi) c.add(path + "/max_value", "not a decimal number: '" + v.max_value + "'");
            if (initial && lo && hi) {
                if (*lo > *hi)
                    c.add(path, "min_value exceeds max_value");
                else if (*initial < *lo || *initial > *hi)
                    c.add(path + "/initial_value", "initial_value outside [min_value, max_value]");
            }

            VariableTable::Slot slot;
            slot.value_name = v.value_name;
            slot.unique_id = v.unique_id;
            slot.initial_value = initial.value_or(Fixed());
            slot.min_value = lo.value_or(Fixed::from_raw(INT64_MIN));
            slot.max_value = hi.value_or(Fixed::from_raw(INT64_MAX));
            slot.hidden = hidden;
            int idx = g.vars.add(std::move(slot));

            auto bind = [&](const std::string& name, const char* field) {
                if (name.empty() || !is_identifier(name)) return;
                auto existing = g.vars.lookup(name);
                if (existing && *existing != idx)
                    c.add(path + "/" + field,
                          "'" + name + "' is ambiguous: it already names another variable");
                else
                    g.vars.alias(name, idx);
            };
            bind(v.value_name, "value_name");
            if (v.unique_id != v.value_name) bind(v.unique_id, "unique_id");
        }
    };
    add_variables(g.state_variables, false, "/state_variables");
    add_variables(g.hidden_variables, true, "/hidden_variables");

    // Both termination flags must exist among the hidden variables.
    int visible = int(g.state_variables.size());
    for (size_t i = 0; i < g.hidden_variables.size(); ++i) {
        if (g.hidden_variables[i].value_name == "has_succeeded")
            g.vars.succeeded_slot = visible + int(i);
        else if (g.hidden_variables[i].value_name == "has_failed")
            g.vars.failed_slot = visible + int(i);
    }
    if (g.vars.succeeded_slot < 0)
        c.add("/hidden_variables", "no hidden variable named 'has_succeeded'");
    if (g.vars.failed_slot < 0)
        c.add("/hidden_variables", "no hidden variable named 'has_failed'");

    std::unordered_set<std::string> scene_ids;
    for (const auto& s : g.scenes) scene_ids.insert(s.unique_id);

    const json& events = doc.at("events");
    for (size_t i = 0; i < events.size(); ++i) {
        const json& e = events[i];
        const std::string path = "/events/" + std::to_string(i);
        EventObject ev;
        ev.event_name = e.at("event_name").get<std::string>();
        ev.unique_id = e.at("unique_id").get<std::string>();
        ev.scene = string_list(e.at("scene"));
        ev.entering_condition = string_list(e.at("entering_condition"));
        ev.succeed_condition = string_list(e.at("succeed_condition"));
        ev.succeed_effect = string_list(e.at("succeed_effect"));
        ev.fail_effect = string_list(e.at("fail_effect"));
        if (e.contains("explanations")) ev.explanations = e["explanations"].get<std::string>();

        claim_id(ev.unique_id, path + "/unique_id", "event");
        for (size_t k = 0; k < ev.scene.size(); ++k)
            if (!scene_ids.count(ev.scene[k]))
                c.add(path + "/scene/" + std::to_string(k),
                      "unknown scene '" + ev.scene[k] + "'");

        ev.entering = compile_conditions(ev.entering_condition, g.vars,
                                         path + "/entering_condition", c);
        ev.succeed = compile_conditions(ev.succeed_condition, g.vars,
                                        path + "/succeed_condition", c);
        ev.on_success = compile_effects(ev.succeed_effect, g.vars, path + "/succeed_effect", c);
        ev.on_fail = compile_effects(ev.fail_effect, g.vars, path + "/fail_effect", c);
        g.events.push_back(std::move(ev));
    }

    const json& checks = doc.at("pre_event_checks");
    for (size_t i = 0; i < checks.size(); ++i) {
        const json& p = checks[i];
        const std::string path = "/pre_event_checks/" + std::to_string(i);
        PreEventCheck pc;
        pc.check_name = p.at("check_name").get<std::string>();
        pc.unique_id = p.at("unique_id").get<std::string>();
        pc.description = p.at("description").get<std::string>();
        pc.condition = string_list(p.at("condition"));
        pc.effect = string_list(p.at("effect"));
        if (p.contains("explanation")) pc.explanation = p["explanation"].get<std::string>();

        claim_id(pc.unique_id, path + "/unique_id", "pre_event_check");
        pc.cond = compile_conditions(pc.condition, g.vars, path + "/condition", c);
        pc.eff = compile_effects(pc.effect, g.vars, path + "/effect", c);
        g.pre_event_checks.push_back(std::move(pc));
    }

    if (!result.report.violations.empty()) {
        result.report.passed = false;
        result.report.failure = FormatReport::Failure::schema;
        return result;
    }
    result.game = std::move(g);
    return result;
}

std::optional<std::string> extract_candidate_json(std::string_view llm_text) {
    std::optional<std::string> best;
    size_t i = 0;
    const size_t n = llm_text.size();
    while (i < n) {
        if (llm_text[i] != '{') {
            ++i;
            continue;
        }
        // scan forward for the matching close, string-aware
        int depth = 0;
        bool in_string = false, escape = false;
        size_t close = std::string_view::npos;
        for (size_t j = i; j < n; ++j) {
            char ch = llm_text[j];
            if (in_string) {
                if (escape) escape = false;
                else if (ch == '\\') escape = true;
                else if (ch == '"') in_string = false;
                continue;
            }
            if (ch == '"') in_string = true;
            else if (ch == '{') ++depth;
            else if (ch == '}') {
                if (--depth == 0) { close = j; break; }
            }
        }
        if (close == std::string_view::npos) {
            ++i;  // unbalanced from here; try the next opening brace
            continue;
        }
        size_t len = close - i + 1;
        if (!best || len > best->size()) best = std::string(llm_text.substr(i, len));
        i = close + 1;
    }
    return best;
}

GameState initial_state(const GameConfig& game) {
    std::vector<int64_t> raw(game.vars.size());
    for (size_t i = 0; i < game.vars.size(); ++i) {
        const auto& s = game.vars.slot(int(i));
        raw[i] = s.initial_value.clamped(s.min_value, s.max_value).raw();
    }
    return GameState(std::move(raw));
}

namespace {

json variable_to_json(const VariableObject& v) {
    return json{{"value_name", v.value_name},   {"unique_id", v.unique_id},
                {"description", v.description}, {"initial_value", v.initial_value},
                {"min_value", v.min_value},     {"max_value", v.max_value}};
}

json trait_to_json(const Trait& t) {
    return json{{"rate", t.rate}, {"description", t.description}};
}

}  // namespace

std::string serialize_game(const GameConfig& g) {
    json doc;
    doc["game_world"] = g.game_world;
    doc["player_name"] = g.player_name;
    doc["player_description"] = g.player_description;
    doc["main_npc_name"] = g.main_npc_name;
    doc["main_npc_description"] = {
        {"text", g.main_npc_description.text},
        {"big5_personality_traits",
         {{"openness", trait_to_json(g.main_npc_description.big5.openness)},
          {"conscientiousness", trait_to_json(g.main_npc_description.big5.conscientiousness)},
          {"extraversion", trait_to_json(g.main_npc_description.big5.extraversion)},
          {"agreeableness", trait_to_json(g.main_npc_description.big5.agreeableness)},
          {"neuroticism", trait_to_json(g.main_npc_description.big5.neuroticism)}}},
        {"additional_facts", g.main_npc_description.additional_facts},
    };
    doc["game_objectives"] = g.game_objectives;
    doc["scenes"] = json::array();
    for (const auto& s : g.scenes)
        doc["scenes"].push_back(json{{"scene_name", s.scene_name},
                                     {"unique_id", s.unique_id},
                                     {"background_description", s.background_description},
                                     {"scene_type", s.scene_type}});
    doc["state_variables"] = json::array();
    for (const auto& v : g.state_variables) doc["state_variables"].push_back(variable_to_json(v));
    doc["hidden_variables"] = json::array();
    for (const auto& v : g.hidden_variables) doc["hidden_variables"].push_back(variable_to_json(v));
    doc["events"] = json::array();
    for (const auto& e : g.events) {
        json je{{"event_name", e.event_name},
                {"unique_id", e.unique_id},
                {"scene", e.scene},
                {"entering_condition", e.entering_condition},
                {"succeed_condition", e.succeed_condition},
                {"succeed_effect", e.succeed_effect},
                {"fail_effect", e.fail_effect}};
        if (e.explanations) je["explanations"] = *e.explanations;
        doc["events"].push_back(std::move(je));
    }
    doc["pre_event_checks"] = json::array();
    for (const auto& p : g.pre_event_checks) {
        json jp{{"check_name", p.check_name},
                {"unique_id", p.unique_id},
                {"description", p.description},
                {"condition", p.condition},
                {"effect", p.effect}};
        if (p.explanation) jp["explanation"] = *p.explanation;
        doc["pre_event_checks"].push_back(std::move(jp));
    }
    if (g.source) doc["source"] = *g.source;
    return doc.dump(2);
}

}  // namespace rpgkit
