#include "support/oracle.hpp"

#include <deque>

namespace rpgkit::testing {

namespace {

using State = std::vector<int64_t>;

// Re-derived classification: run checks in order, latch the flags, read
// success before lose.
struct Classified {
    State state;
    int kind;  // 0 none, 1 success, 2 lose
};

Classified classify(const GameConfig& g, const State& raw) {
    GameState s{State(raw)};
    int succ = g.vars.succeeded_slot, fail = g.vars.failed_slot;
    for (const auto& check : g.pre_event_checks) {
        if (!eval_condition(check.cond, s)) continue;
        bool sw = s.value(succ).truthy(), fw = s.value(fail).truthy();
        GameState next = apply_effects(check.eff, s, g.vars);
        State nraw = next.raw();
        if (sw && !next.value(succ).truthy()) nraw[size_t(succ)] = s.value(succ).raw();
        if (fw && !next.value(fail).truthy()) nraw[size_t(fail)] = s.value(fail).raw();
        s = GameState(std::move(nraw));
    }
    int kind = 0;
    if (s.value(succ).truthy()) kind = 1;
    else if (s.value(fail).truthy()) kind = 2;
    return {s.raw(), kind};
}

// Successors of a non-terminal state, in event declaration order. Each
// element carries the post-check state, its classification, and the id of
// the event taken.
struct Step {
    State state;
    int kind;
    std::string event;
};

std::vector<Step> successors(const GameConfig& g, const State& raw) {
    std::vector<Step> out;
    GameState s{State(raw)};
    for (const auto& e : g.events) {
        if (!eval_condition(e.entering, s)) continue;
        bool outcome = eval_condition(e.succeed, s);
        GameState next = apply_effects(outcome ? e.on_success : e.on_fail, s, g.vars);
        Classified c = classify(g, next.raw());
        out.push_back({std::move(c.state), c.kind, e.unique_id});
    }
    return out;
}

}  // namespace

OracleResult oracle_explore(const GameConfig& g, size_t max_states) {
    OracleResult r;

    std::set<std::string> referenced;
    for (const auto& e : g.events)
        for (const auto& sid : e.scene) referenced.insert(sid);
    for (const auto& s : g.scenes)
        if (!referenced.count(s.unique_id)) r.unreferenced_scenes.insert(s.unique_id);

    try {
        Classified root = classify(g, initial_state(g).raw());
        r.visited.insert(root.state);

        // pass 1: depth-first reachability
        if (root.kind == 0) {
            std::vector<State> stack{root.state};
            while (!stack.empty()) {
                if (r.visited.size() > max_states) {
                    r.limit_hit = true;
                    break;
                }
                State cur = std::move(stack.back());
                stack.pop_back();
                for (auto& step : successors(g, cur)) {
                    r.triggered.insert(step.event);
                    if (!r.visited.insert(step.state).second) continue;
                    if (step.kind == 1) {
                        r.success_found = true;
                        r.success_states.insert(step.state);
                    } else if (step.kind == 2) {
                        r.lose_found = true;
                        r.lose_states.insert(step.state);
                    } else {
                        stack.push_back(std::move(step.state));
                    }
                }
            }
        }

        // pass 2: level-by-level depths for the terminal states
        if (!r.limit_hit && root.kind == 0) {
            std::set<State> seen{root.state};
            std::deque<std::pair<State, uint32_t>> frontier{{root.state, 0}};
            while (!frontier.empty()) {
                auto [cur, depth] = std::move(frontier.front());
                frontier.pop_front();
                for (auto& step : successors(g, cur)) {
                    if (!seen.insert(step.state).second) continue;
                    if (step.kind == 1) r.success_depths.emplace(step.state, depth + 1);
                    else if (step.kind == 2) r.lose_depths.emplace(step.state, depth + 1);
                    else frontier.emplace_back(std::move(step.state), depth + 1);
                }
            }
        }
    } catch (const EvalError&) {
        r.eval_error = true;
    }

    bool all_triggered = r.triggered.size() == g.events.size();
    bool conjunct = r.success_found && r.lose_found && all_triggered &&
                    r.unreferenced_scenes.empty();
    if (r.eval_error) r.verdict = "invalid";
    else if (conjunct) r.verdict = "valid";
    else if (r.limit_hit) r.verdict = "limit_reached";
    else r.verdict = "invalid";
    return r;
}

}  // namespace rpgkit::testing
