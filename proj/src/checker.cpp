#include "rpgkit/checker.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "rpgkit/util.hpp"

namespace rpgkit {

using nlohmann::json;

std::pair<uint32_t, bool> StateSet::insert(const std::vector<int64_t>& state) {
    uint64_t h = hasher_(state);
    auto it = first_.find(h);
    if (it == first_.end()) {
        first_.emplace(h, uint32_t(count_));
        arena_.insert(arena_.end(), state.begin(), state.end());
        return {uint32_t(count_++), true};
    }
    if (equal_at(it->second, state)) return {it->second, false};
    for (const auto& [oh, idx] : overflow_)
        if (oh == h && equal_at(idx, state)) return {idx, false};
    overflow_.emplace_back(h, uint32_t(count_));
    arena_.insert(arena_.end(), state.begin(), state.end());
    return {uint32_t(count_++), true};
}

bool StateSet::equal_at(uint32_t index, const std::vector<int64_t>& state) const {
    const int64_t* base = arena_.data() + size_t(index) * width_;
    for (size_t i = 0; i < width_; ++i)
        if (base[i] != state[i]) return false;
    return true;
}

std::vector<int64_t> StateSet::state_at(uint32_t index) const {
    const int64_t* base = arena_.data() + size_t(index) * width_;
    return std::vector<int64_t>(base, base + width_);
}

std::pair<TerminationKind, GameState> classify_termination(const GameConfig& game,
                                                           const GameState& state) {
    GameState s = state;
    const int succ = game.vars.succeeded_slot;
    const int fail = game.vars.failed_slot;
    for (const auto& check : game.pre_event_checks) {
        if (!eval_condition(check.cond, s)) continue;
        bool succ_was = s.value(succ).truthy();
        bool fail_was = s.value(fail).truthy();
        GameState next = apply_effects(check.eff, s, game.vars);
        // termination flags are latched: a check may set them, never clear them
        if ((succ_was && !next.value(succ).truthy()) ||
            (fail_was && !next.value(fail).truthy())) {
            std::vector<int64_t> raw = next.raw();
            if (succ_was) raw[size_t(succ)] = s.value(succ).raw();
            if (fail_was) raw[size_t(fail)] = s.value(fail).raw();
            next = GameState(std::move(raw));
        }
        s = std::move(next);
    }
    TerminationKind kind = TerminationKind::none;
    if (s.value(succ).truthy()) kind = TerminationKind::success;
    else if (s.value(fail).truthy()) kind = TerminationKind::lose;
    return {kind, std::move(s)};
}

namespace {

struct QueueItem {
    uint32_t index;
    uint32_t depth;
};

}  // namespace

ValidityReport check_validity(const GameConfig& game, const CheckerConfig& cfg,
                              CheckerTrace* trace) {
    ValidityReport report;

    // Scene reference check: independent of the state search.
    std::unordered_set<std::string> referenced;
    for (const auto& e : game.events)
        for (const auto& sid : e.scene) referenced.insert(sid);
    for (const auto& s : game.scenes)
        if (!referenced.count(s.unique_id)) report.unreferenced_scenes.push_back(s.unique_id);

    std::unordered_set<std::string> triggered;
    StateSet visited(game.vars.size());
    std::deque<QueueItem> queue;
    std::unordered_set<uint64_t> success_hashes, lose_hashes;
    bool limit_hit = false;

    auto record_termination = [&](TerminationKind kind, const GameState& s, uint32_t depth) {
        if (kind == TerminationKind::success) {
            if (success_hashes.insert(s.hash()).second) {
                report.termination_catalog.success_terminations.push_back({s.hash(), depth});
                if (trace) trace->success_states.push_back(s.raw());
            }
            report.success_found = true;
        } else if (kind == TerminationKind::lose) {
            if (lose_hashes.insert(s.hash()).second) {
                report.termination_catalog.losing_terminations.push_back({s.hash(), depth});
                if (trace) trace->lose_states.push_back(s.raw());
            }
            report.lose_found = true;
        }
    };

    try {
        // The root is the post-check initial state; if it is already
        // terminal nothing is explored and no termination is credited
        // (terminations are only discovered through event transitions).
        auto [root_kind, root] = classify_termination(game, initial_state(game));
        auto [root_idx, root_new] = visited.insert(root.raw());
        (void)root_new;
        if (root_kind == TerminationKind::none) queue.push_back({root_idx, 0});

        while (!queue.empty()) {
            QueueItem item = queue.front();
            queue.pop_front();
            if (visited.size() > cfg.max_states) {
                limit_hit = true;
                break;
            }
            GameState state{visited.state_at(item.index)};

            for (const auto& event : game.events) {
                if (!eval_condition(event.entering, state)) continue;
                triggered.insert(event.unique_id);
                bool outcome = eval_condition(event.succeed, state);
                GameState next =
                    apply_effects(outcome ? event.on_success : event.on_fail, state, game.vars);
                auto [kind, settled] = classify_termination(game, next);
                auto [idx, inserted] = visited.insert(settled.raw());
                if (!inserted) continue;
                uint32_t depth = item.depth + 1;
                record_termination(kind, settled, depth);
                if (kind == TerminationKind::none) queue.push_back({idx, depth});
            }
        }
    } catch (const EvalError& e) {
        report.diagnostic = std::string("evaluation error during exploration: ") + e.what();
    }

    for (const auto& e : game.events) {
        if (triggered.count(e.unique_id)) report.triggered_events.push_back(e.unique_id);
        else report.unreachable_events.push_back(e.unique_id);
    }
    report.states_explored = visited.size();
    if (trace) {
        trace->visited.clear();
        for (uint32_t i = 0; i < visited.size(); ++i) trace->visited.push_back(visited.state_at(i));
    }

    bool conjunct = report.success_found && report.lose_found &&
                    report.unreachable_events.empty() && report.unreferenced_scenes.empty();
    if (report.diagnostic) report.verdict = Verdict::invalid;
    else if (conjunct) report.verdict = Verdict::valid;
    else if (limit_hit) report.verdict = Verdict::limit_reached;
    else report.verdict = Verdict::invalid;
    return report;
}

namespace {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::valid: return "valid";
        case Verdict::invalid: return "invalid";
        case Verdict::limit_reached: return "limit_reached";
    }
    return "invalid";
}

json catalog_side(const std::vector<TerminationEntry>& side) {
    // sorted by (depth, hash) so reports are stable regardless of insertion order
    auto sorted = side;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.depth != b.depth ? a.depth < b.depth : a.state_hash < b.state_hash;
    });
    json arr = json::array();
    for (const auto& t : sorted)
        arr.push_back(json{{"state_hash", to_hex64(t.state_hash)}, {"depth", t.depth}});
    return arr;
}

}  // namespace

json ValidityReport::to_json() const {
    json j;
    j["verdict"] = verdict_name(verdict);
    j["success_found"] = success_found;
    j["lose_found"] = lose_found;
    j["triggered_events"] = triggered_events;
    j["unreachable_events"] = unreachable_events;
    j["unreferenced_scenes"] = unreferenced_scenes;
    j["states_explored"] = states_explored;
    j["termination_catalog"] = {
        {"success_terminations", catalog_side(termination_catalog.success_terminations)},
        {"losing_terminations", catalog_side(termination_catalog.losing_terminations)},
    };
    if (diagnostic) j["diagnostic"] = *diagnostic;
    return j;
}

Ratio count_ratio(const TerminationCatalog& cat) {
    if (cat.losing_terminations.empty()) throw UndefinedRatio();
    long long s = (long long)cat.success_terminations.size();
    long long l = (long long)cat.losing_terminations.size();
    long long g = std::gcd(s, l);
    if (g == 0) g = 1;
    return Ratio{s / g, l / g};
}

Ratio length_ratio(const TerminationCatalog& cat) {
    if (cat.success_terminations.empty() || cat.losing_terminations.empty())
        throw UndefinedRatio();
    long long sum_l = 0, sum_s = 0;
    for (const auto& t : cat.losing_terminations) sum_l += t.depth;
    for (const auto& t : cat.success_terminations) sum_s += t.depth;
    long long num = sum_l * (long long)cat.success_terminations.size();
    long long den = sum_s * (long long)cat.losing_terminations.size();
    if (den == 0) throw UndefinedRatio();
    long long g = std::gcd(num, den);
    if (g == 0) g = 1;
    return Ratio{num / g, den / g};
}

}  // namespace rpgkit
