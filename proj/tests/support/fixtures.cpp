#include "support/fixtures.hpp"

#include <cstdio>
#include <cstdlib>

#include "rpgkit/util.hpp"

namespace rpgkit::testing {

std::string fixture_path(const std::string& relative) {
    return std::string(RPGKIT_FIXTURE_DIR) + "/" + relative;
}

std::string repo_path(const std::string& relative) {
    return std::string(RPGKIT_REPO_DIR) + "/" + relative;
}

std::string load_fixture(const std::string& relative) {
    return read_file(fixture_path(relative));
}

const GameConfig& two_switch_game() {
    static GameConfig game = [] {
        auto result = parse_game(load_fixture("games/two_switch.json"));
        if (!result.game) {
            std::fprintf(stderr, "two_switch.json fails format check:\n");
            for (const auto& v : result.report.violations)
                std::fprintf(stderr, "  %s: %s\n", v.path.c_str(), v.message.c_str());
            std::abort();
        }
        return std::move(*result.game);
    }();
    return game;
}

}  // namespace rpgkit::testing
