#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rpgkit/schema.hpp"
#include "rpgkit/simulation.hpp"

using namespace rpgkit;
using nlohmann::json;

namespace {

const json kSchema = json::parse(R"({
  "type": "object",
  "required": ["name", "items"],
  "properties": {
    "name": { "type": "string" },
    "kind": { "enum": ["a", "b"] },
    "items": {
      "type": "array",
      "minItems": 2,
      "items": { "$ref": "#/$defs/entry" },
      "contains": { "properties": { "tag": { "enum": ["special"] } } }
    },
    "nested": {
      "type": "object",
      "properties": { "flag": { "type": "boolean" } },
      "additionalProperties": false
    }
  },
  "additionalProperties": false,
  "$defs": {
    "entry": {
      "type": "object",
      "required": ["tag"],
      "properties": { "tag": { "type": "string" }, "weight": { "type": "number" } },
      "additionalProperties": false
    }
  }
})");

bool violates(const json& instance, const std::string& path) {
    for (const auto& v : schema_validate(kSchema, instance))
        if (v.path == path) return true;
    return false;
}

}  // namespace

TEST_CASE("schema engine accepts a conforming instance") {
    json ok = json::parse(R"({
      "name": "x",
      "kind": "a",
      "items": [{"tag": "special", "weight": 1.5}, {"tag": "plain"}],
      "nested": {"flag": true}
    })");
    CHECK(schema_validate(kSchema, ok).empty());
}

TEST_CASE("schema engine flags each keyword violation with its path") {
    json base = json::parse(R"({
      "name": "x",
      "items": [{"tag": "special"}, {"tag": "plain"}]
    })");

    json missing = base;
    missing.erase("name");
    CHECK(violates(missing, "/name"));

    json extra = base;
    extra["zap"] = 1;
    CHECK(violates(extra, "/zap"));

    json wrong_type = base;
    wrong_type["name"] = 5;
    CHECK(violates(wrong_type, "/name"));

    json bad_enum = base;
    bad_enum["kind"] = "c";
    CHECK(violates(bad_enum, "/kind"));

    json too_few = base;
    too_few["items"] = json::array({json{{"tag", "special"}}});
    CHECK(violates(too_few, "/items"));

    json no_special = base;
    no_special["items"] = json::array({json{{"tag", "plain"}}, json{{"tag", "plain"}}});
    CHECK(violates(no_special, "/items"));

    json bad_item = base;
    bad_item["items"][1]["weight"] = "heavy";
    CHECK(violates(bad_item, "/items/1/weight"));

    json deep_extra = base;
    deep_extra["nested"] = json{{"flag", true}, {"spurious", 1}};
    CHECK(violates(deep_extra, "/nested/spurious"));

    // additionalProperties defaults to permissive when not declared
    json loose_schema = json::parse(R"({"type": "object", "properties": {"a": {"type": "string"}}})");
    CHECK(schema_validate(loose_schema, json::parse(R"({"a": "x", "b": 1})")).empty());
}

TEST_CASE("schema engine collects violations exhaustively") {
    json bad = json::parse(R"({"name": 5, "kind": "z", "extra": true, "items": []})");
    auto violations = schema_validate(kSchema, bad);
    CHECK(violations.size() >= 4);  // type, enum, extra key, minItems (+contains)
}

TEST_CASE("text parsers survive arbitrary input without throwing") {
    std::mt19937_64 rng(31337);
    const std::string alphabet = "{}[]\"\\`:,.ab01 \n\t#EVENT PLANARRTIONGAMESTAT-";
    for (int i = 0; i < 3000; ++i) {
        size_t len = rng() % 160;
        std::string s;
        for (size_t k = 0; k < len; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
        CHECK_NOTHROW((void)extract_candidate_json(s));
        CHECK_NOTHROW((void)parse_round_output(s));
    }
    // structured prefixes too
    std::string almost =
        "```EVENT PLAN\n[{\"event_id\": \"E001\", \"phase\": \"start\"}\n```\n```NARRATION\nx\n[\"a\"]\n```";
    CHECK_NOTHROW((void)parse_round_output(almost));
}
