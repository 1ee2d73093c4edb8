#pragma once

#include <string>

#include "rpgkit/game.hpp"

namespace rpgkit::testing {

std::string fixture_path(const std::string& relative);
std::string repo_path(const std::string& relative);
std::string load_fixture(const std::string& relative);

// Parsed two_switch.json; aborts the test run if the fixture is broken.
const GameConfig& two_switch_game();

}  // namespace rpgkit::testing
