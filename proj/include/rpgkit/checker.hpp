#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpgkit/game.hpp"

namespace rpgkit {

enum class TerminationKind { none, success, lose };

struct TerminationEntry {
    uint64_t state_hash;
    uint32_t depth;  // events applied from the initial state, >= 1
};

// Discovered terminal states, deduplicated by state hash, first (shallowest)
// discovery wins.
struct TerminationCatalog {
    std::vector<TerminationEntry> success_terminations;
    std::vector<TerminationEntry> losing_terminations;
};

struct CheckerConfig {
    uint64_t max_states = 10'000'000;
    // Keeps full value vectors of visited/terminal states for test oracles.
    bool keep_trace = false;
};

enum class Verdict { valid, invalid, limit_reached };

struct ValidityReport {
    Verdict verdict = Verdict::invalid;
    bool success_found = false;
    bool lose_found = false;
    std::vector<std::string> triggered_events;    // declaration order
    std::vector<std::string> unreachable_events;  // declaration order
    std::vector<std::string> unreferenced_scenes;
    uint64_t states_explored = 0;
    TerminationCatalog termination_catalog;
    std::optional<std::string> diagnostic;  // set on evaluation errors

    nlohmann::json to_json() const;
};

// Debug side channel for oracle comparison.
struct CheckerTrace {
    std::vector<std::vector<int64_t>> visited;
    std::vector<std::vector<int64_t>> success_states;
    std::vector<std::vector<int64_t>> lose_states;
};

// Runs the pre-event checks in declaration order (a check whose condition
// holds applies its effects; a set termination flag is never cleared by a
// check), then reads the flags. Success wins when both are set. Returns the
// post-check state: that state, not the input, is what exploration and
// simulation carry forward.
std::pair<TerminationKind, GameState> classify_termination(const GameConfig& game,
                                                           const GameState& state);

// Exhaustive breadth-first exploration of the reachable state space.
// A game is valid iff every event triggers at least once, both a success
// and a losing termination are discovered, and every declared scene is
// referenced by some event. States are deduplicated by exact value vector
// (hash plus full comparison on collision).
ValidityReport check_validity(const GameConfig& game, const CheckerConfig& cfg,
                              CheckerTrace* trace = nullptr);

// Difficulty ratios over the termination catalog.
struct Ratio {
    long long num = 0;
    long long den = 1;
    double value() const { return double(num) / double(den); }
};

struct UndefinedRatio : std::runtime_error {
    UndefinedRatio() : std::runtime_error("ratio denominator is zero") {}
};

Ratio count_ratio(const TerminationCatalog& cat);   // |S| / |L|
Ratio length_ratio(const TerminationCatalog& cat);  // (sum depth L / sum depth S) * |S|/|L|

// Visited-state set: dense arena of fixed-width states indexed by a hash
// map, with full-state verification on hash collision. The hasher is
// injectable so collision handling is testable.
class StateSet {
public:
    using Hasher = std::function<uint64_t(const std::vector<int64_t>&)>;

    explicit StateSet(size_t width, Hasher hasher = &GameState::hash_raw)
        : width_(width), hasher_(std::move(hasher)) {}

    // Returns (index, inserted).
    std::pair<uint32_t, bool> insert(const std::vector<int64_t>& state);
    size_t size() const { return count_; }
    std::vector<int64_t> state_at(uint32_t index) const;

private:
    bool equal_at(uint32_t index, const std::vector<int64_t>& state) const;

    size_t width_;
    Hasher hasher_;
    std::vector<int64_t> arena_;
    std::unordered_map<uint64_t, uint32_t> first_;
    std::vector<std::pair<uint64_t, uint32_t>> overflow_;  // true hash collisions
    size_t count_ = 0;
};

}  // namespace rpgkit
