#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rpgkit/game.hpp"

namespace rpgkit::testing {

// Independent exhaustive enumerator used as the oracle for check_validity.
// It shares only the expression primitives with the checker: exploration is
// depth-first over std::set of exact value vectors (no hashing, no arena,
// no queue), classification is re-derived here, and terminal depths come
// from a second level-by-level pass over the enumerated graph.
struct OracleResult {
    bool success_found = false;
    bool lose_found = false;
    bool limit_hit = false;
    bool eval_error = false;
    std::set<std::string> triggered;
    std::set<std::vector<int64_t>> visited;
    std::set<std::vector<int64_t>> success_states;
    std::set<std::vector<int64_t>> lose_states;
    std::map<std::vector<int64_t>, uint32_t> success_depths;
    std::map<std::vector<int64_t>, uint32_t> lose_depths;
    std::set<std::string> unreferenced_scenes;
    std::string verdict;  // "valid" | "invalid" | "limit_reached"
};

OracleResult oracle_explore(const GameConfig& game, size_t max_states = 1'000'000);

}  // namespace rpgkit::testing
