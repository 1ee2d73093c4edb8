#pragma once

#include <vector>

#include "json.hpp"
#include "rpgkit/game.hpp"

namespace rpgkit {

// Validator for the JSON Schema subset used by the game configuration
// schema: type, required, properties, additionalProperties:false, items,
// minItems, contains, enum, and $ref into #/$defs. Violation paths are
// JSON pointers into the instance.
std::vector<FormatViolation> schema_validate(const nlohmann::json& schema,
                                             const nlohmann::json& instance);

}  // namespace rpgkit
