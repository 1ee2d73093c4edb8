#pragma once

#include <cstdint>
#include <string>

#include "rpgkit/game.hpp"

namespace rpgkit::testing {

// Seeded random game factory for oracle-equivalence testing. Every output
// passes the format check. Shapes stay small on purpose: at most 2 visible
// variables with integer domains of <= 10 values plus the two hidden flags,
// and at most 5 events. Operators are limited to +, -, * with integer
// constants so evaluation can never fault.
std::string generate_game_json(uint64_t seed);

GameConfig generate_game(uint64_t seed);  // aborts if the generator broke its own contract

}  // namespace rpgkit::testing
