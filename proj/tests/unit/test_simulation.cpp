#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "rpgkit/simulation.hpp"
#include "rpgkit/util.hpp"
#include "support/fixtures.hpp"

using namespace rpgkit;
using nlohmann::json;
using rpgkit::testing::fixture_path;
using rpgkit::testing::two_switch_game;

namespace {

std::vector<std::string> script_lines(const std::string& name) {
    std::vector<std::string> out;
    std::ifstream in(fixture_path("scripts/" + name));
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(json::parse(line)["response"].get<std::string>());
    }
    return out;
}

Trajectory run_script(const std::string& script_name, int cap = 10, uint64_t seed = 7) {
    ScriptedBackend backend(script_lines(script_name));
    SimulationParams params;
    params.game_id = "two_switch";
    params.model = "scripted";
    params.seed = seed;
    params.rounds_cap = cap;
    params.config_hash = "cafebabecafebabe";
    return run_simulation(two_switch_game(), backend, params);
}

std::string first_round_text() { return script_lines("two_switch.clean3.jsonl")[0]; }

int count_kind(const Trajectory& t, EventErrorKind kind, const std::string& event_id = "") {
    int n = 0;
    for (const auto& r : t.rounds)
        for (const auto& e : r.errors.event_condition_errors)
            if (e.kind == kind && (event_id.empty() || e.event_id == event_id)) ++n;
    return n;
}

int count_vue(const Trajectory& t) {
    int n = 0;
    for (const auto& r : t.rounds) n += int(r.errors.variable_update_errors.size());
    return n;
}

std::string temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "rpgkit_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("well-formed round text parses into all three sections") {
    auto parsed = parse_round_output(first_round_text());
    auto* out = std::get_if<RoundOutput>(&parsed);
    REQUIRE(out);
    REQUIRE(out->event_plan.size() == 2);
    CHECK(out->event_plan[0].event_id == "E001");
    CHECK(out->event_plan[0].phase == PlanPhase::start);
    CHECK(out->event_plan[1].phase == PlanPhase::end);
    CHECK(out->event_plan[1].outcome == PlanOutcome::success);
    CHECK(out->narration.find("drives the first switch") != std::string::npos);
    CHECK(out->narration.find("Head for the second bank") == std::string::npos);
    CHECK(out->candidate_actions[0] == "Head for the second bank");
    CHECK(out->reported_state.at("progress") == "1");
}

TEST_CASE("surrounding prose and foreign fences are tolerated") {
    std::string text = "Sure! Here is the round.\n```thinking\nnot a section\n```\n" +
                       first_round_text() + "\nHope you enjoy it!";
    auto parsed = parse_round_output(text);
    CHECK(std::get_if<RoundOutput>(&parsed));
}

TEST_CASE("missing or malformed sections fail with the right section name") {
    auto section_of = [](std::string text) {
        auto parsed = parse_round_output(text);
        auto* f = std::get_if<RoundParseFailure>(&parsed);
        REQUIRE(f);
        return f->section;
    };

    std::string full = first_round_text();
    auto drop_block = [&](const std::string& label) {
        std::string text = full;
        auto pos = text.find("```" + label);
        auto close = text.find("\n```\n", pos);
        text.erase(pos, close + 5 - pos);
        return text;
    };
    CHECK(section_of(drop_block("GAME STATE")) == "state");
    CHECK(section_of(drop_block("EVENT PLAN")) == "plan");
    CHECK(section_of(drop_block("NARRATION")) == "narration");

    // two actions instead of three
    std::string two = full;
    auto pos = two.find("\"Check the gauges\"");
    two.erase(two.rfind(", ", pos), std::string("\"Check the gauges\"").size() + 2);
    CHECK(section_of(two) == "actions");

    // no trailing array at all
    std::string none = full;
    auto a = none.find("[\"Head");
    none.erase(a, none.find(']', a) - a + 1);
    CHECK(section_of(none) == "actions");

    // outcome on a start entry
    std::string bad_outcome = full;
    bad_outcome.replace(bad_outcome.find("\"phase\": \"start\""),
                        std::string("\"phase\": \"start\"").size(),
                        "\"phase\": \"start\", \"outcome\": \"success\"");
    CHECK(section_of(bad_outcome) == "plan");

    // end entry without outcome
    std::string no_outcome = full;
    no_outcome.replace(no_outcome.find(", \"outcome\": \"success\""),
                       std::string(", \"outcome\": \"success\"").size(), "");
    CHECK(section_of(no_outcome) == "plan");
}

TEST_CASE("brackets inside action strings do not break the action scan") {
    std::string text =
        "```EVENT PLAN\n[]\n```\n"
        "```NARRATION\nElm waves [stage: gruffly] toward the lever.\n"
        "[\"Pull it [hard]\", \"Wait\", \"Ask why\"]\n```\n"
        "```GAME STATE\n{\"progress\": \"0\", \"has_succeeded\": \"0\", \"has_failed\": \"0\"}\n```\n";
    auto parsed = parse_round_output(text);
    auto* out = std::get_if<RoundOutput>(&parsed);
    REQUIRE(out);
    CHECK(out->candidate_actions[0] == "Pull it [hard]");
    CHECK(out->narration == "Elm waves [stage: gruffly] toward the lever.");
}

TEST_CASE("unknown event ids are rejected against the game") {
    std::string text = first_round_text();
    auto parsed = parse_round_output(text);
    auto* out = std::get_if<RoundOutput>(&parsed);
    REQUIRE(out);
    CHECK(!validate_round_output(*out, two_switch_game()));
    out->event_plan[0].event_id = "E404";
    auto bad = validate_round_output(*out, two_switch_game());
    REQUIRE(bad);
    CHECK(bad->section == "plan");
}

TEST_CASE("expected_state_after: clean start/end pair") {
    const GameConfig& g = two_switch_game();
    std::set<std::string> open;
    std::vector<EventPlanEntry> plan{{"E001", PlanPhase::start, std::nullopt},
                                     {"E001", PlanPhase::end, PlanOutcome::success}};
    auto walk = expected_state_after(initial_state(g), plan, g, open);
    CHECK(walk.errors.empty());
    CHECK(walk.state.value(0) == Fixed::from_int(1));
    CHECK(walk.termination == TerminationKind::none);
    CHECK(open.empty());
}

TEST_CASE("expected_state_after: entering condition violations") {
    const GameConfig& g = two_switch_game();
    std::set<std::string> open;
    // E002 needs progress >= 1 but progress is 0
    std::vector<EventPlanEntry> plan{{"E002", PlanPhase::start, std::nullopt}};
    auto walk = expected_state_after(initial_state(g), plan, g, open);
    REQUIRE(walk.errors.size() == 1);
    CHECK(walk.errors[0].event_id == "E002");
    CHECK(walk.errors[0].kind == EventErrorKind::bad_entry);
    CHECK(open.count("E002"));  // still considered open for later end entries
}

TEST_CASE("expected_state_after: outcome mismatch") {
    const GameConfig& g = two_switch_game();
    std::set<std::string> open;
    // progress = 1: E002 may start, but success requires progress == 2
    GameState at_one(std::vector<int64_t>{Fixed::from_int(1).raw(), 0, 0});
    std::vector<EventPlanEntry> plan{{"E002", PlanPhase::start, std::nullopt},
                                     {"E002", PlanPhase::end, PlanOutcome::success}};
    auto walk = expected_state_after(at_one, plan, g, open);
    REQUIRE(walk.errors.size() == 1);
    CHECK(walk.errors[0].event_id == "E002");
    CHECK(walk.errors[0].kind == EventErrorKind::bad_outcome);
    // the claimed outcome's effect is applied: has_succeeded was set, so the
    // walk reports a (spurious, engine-claimed) success termination
    CHECK(walk.termination == TerminationKind::success);
}

TEST_CASE("expected_state_after: ending an event that never started") {
    const GameConfig& g = two_switch_game();
    std::set<std::string> open;
    GameState at_two(std::vector<int64_t>{Fixed::from_int(2).raw(), 0, 0});
    std::vector<EventPlanEntry> plan{{"E002", PlanPhase::end, PlanOutcome::success}};
    auto walk = expected_state_after(at_two, plan, g, open);
    REQUIRE(walk.errors.size() == 1);
    CHECK(walk.errors[0].kind == EventErrorKind::bad_entry);
    // one error per entry even though the outcome also would have counted
}

TEST_CASE("events spanning rounds keep their open state") {
    const GameConfig& g = two_switch_game();
    std::set<std::string> open;
    std::vector<EventPlanEntry> round1{{"E001", PlanPhase::start, std::nullopt}};
    auto walk1 = expected_state_after(initial_state(g), round1, g, open);
    CHECK(walk1.errors.empty());
    CHECK(open.count("E001"));
    CHECK(walk1.state.value(0) == Fixed::from_int(0));  // start has no effect

    std::vector<EventPlanEntry> round2{{"E001", PlanPhase::end, PlanOutcome::success}};
    auto walk2 = expected_state_after(walk1.state, round2, g, open);
    CHECK(walk2.errors.empty());
    CHECK(walk2.state.value(0) == Fixed::from_int(1));
    CHECK(!open.count("E001"));
}

TEST_CASE("check_variable_updates") {
    const GameConfig& g = two_switch_game();
    GameState expected(std::vector<int64_t>{Fixed::from_int(1).raw(), 0, 0});

    std::map<std::string, std::string> exact{
        {"progress", "1"}, {"has_succeeded", "0"}, {"has_failed", "0"}};
    CHECK(check_variable_updates(expected, exact, g).empty());

    std::map<std::string, std::string> by_id{{"V001", "1"}, {"H001", "0"}, {"H002", "0"}};
    CHECK(check_variable_updates(expected, by_id, g).empty());

    std::map<std::string, std::string> off{{"progress", "6"}, {"has_succeeded", "0"},
                                           {"has_failed", "0"}};
    CHECK(check_variable_updates(expected, off, g) == std::vector<std::string>{"V001"});

    std::map<std::string, std::string> missing_flag{{"progress", "1"}, {"has_succeeded", "0"}};
    CHECK(check_variable_updates(expected, missing_flag, g) == std::vector<std::string>{"H002"});

    std::map<std::string, std::string> garbage{{"progress", "soon"}, {"has_succeeded", "0"},
                                               {"has_failed", "0"}};
    CHECK(check_variable_updates(expected, garbage, g) == std::vector<std::string>{"V001"});

    // equivalent spellings of the same number match
    std::map<std::string, std::string> spelled{{"progress", "1.0000"}, {"has_succeeded", "0"},
                                               {"has_failed", "0"}};
    CHECK(check_variable_updates(expected, spelled, g).empty());
}

TEST_CASE("random player is deterministic and roughly uniform") {
    RandomPlayer player{12345};
    for (int r = 0; r < 50; ++r) CHECK(player.choose(r) == RandomPlayer{12345}.choose(r));

    int counts[3] = {0, 0, 0};
    for (int r = 0; r < 30000; ++r) ++counts[player.choose(r)];
    for (int c : counts) {
        CHECK(double(c) / 30000.0 >= 0.31);
        CHECK(double(c) / 30000.0 <= 0.36);
    }
    CHECK(RandomPlayer{1}.choose(0) >= 0);
    CHECK(RandomPlayer{1}.choose(0) <= 2);
}

TEST_CASE("narration length counts whitespace-delimited words") {
    CHECK(narration_length("The door creaks open.") == 4);
    CHECK(narration_length("") == 0);
    CHECK(narration_length("  two\n words \t here  ") == 3);

    std::string paragraph;
    for (int i = 0; i < 200; ++i) {
        if (i) paragraph += i % 12 == 0 ? "\n" : " ";
        paragraph += "word" + std::to_string(i);
    }
    CHECK(narration_length(paragraph) == 200);
}

TEST_CASE("clean scripted run terminates in success with no errors") {
    Trajectory t = run_script("two_switch.clean3.jsonl");
    CHECK(t.termination == TerminationReason::game_success);
    REQUIRE(t.rounds.size() == 3);
    for (const auto& r : t.rounds) {
        CHECK(!r.has_errors());
        CHECK(r.len_words.has_value());
    }
    // final expected state: progress 2, has_succeeded 1
    CHECK(t.rounds.back().expected_state.value(0) == Fixed::from_int(2));
    CHECK(t.rounds.back().expected_state.value(1) == Fixed::from_int(1));
    // the terminal round takes no player action
    CHECK(t.rounds.back().chosen_action_index == -1);
    CHECK(t.rounds[0].chosen_action_index >= 0);
}

TEST_CASE("round cap stops a never-terminating game") {
    Trajectory t = run_script("two_switch.idle12.jsonl", 10);
    CHECK(t.termination == TerminationReason::round_cap);
    CHECK(t.rounds.size() == 10);
}

TEST_CASE("unparseable rounds are recorded and the loop continues") {
    Trajectory t = run_script("two_switch.garbled.jsonl", 4);
    CHECK(t.termination == TerminationReason::round_cap);
    REQUIRE(t.rounds.size() == 4);
    for (const auto& r : t.rounds) {
        CHECK(r.parse_failure.has_value());
        CHECK(r.has_errors());
        CHECK(!r.len_words.has_value());
        CHECK(r.chosen_action_index == -1);
    }
}

TEST_CASE("engine failure keeps the partial trajectory") {
    auto lines = script_lines("two_switch.clean3.jsonl");
    lines.resize(1);
    ScriptedBackend backend(lines);
    SimulationParams params;
    params.game_id = "two_switch";
    params.model = "scripted";
    params.rounds_cap = 10;
    Trajectory t = run_simulation(two_switch_game(), backend, params);
    CHECK(t.termination == TerminationReason::engine_failure);
    CHECK(t.rounds.size() == 1);
    CHECK(t.engine_error.has_value());
}

TEST_CASE("planted mechanic errors are detected exactly") {
    SUBCASE("no plants, no errors") {
        Trajectory t = run_script("two_switch.planted_k0.jsonl");
        CHECK(t.termination == TerminationReason::game_success);
        CHECK(count_kind(t, EventErrorKind::bad_entry) == 0);
        CHECK(count_kind(t, EventErrorKind::bad_outcome) == 0);
        CHECK(count_vue(t) == 0);
    }
    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        Trajectory entry = run_script("two_switch.bad_entry_k" + std::to_string(k) + ".jsonl");
        CHECK(entry.termination == TerminationReason::game_success);
        CHECK(count_kind(entry, EventErrorKind::bad_entry, "E001") == k);
        CHECK(count_kind(entry, EventErrorKind::bad_outcome) == 0);
        CHECK(count_vue(entry) == 0);

        Trajectory outcome = run_script("two_switch.bad_outcome_k" + std::to_string(k) + ".jsonl");
        CHECK(outcome.termination == TerminationReason::game_success);
        CHECK(count_kind(outcome, EventErrorKind::bad_outcome, "E003") == k);
        CHECK(count_kind(outcome, EventErrorKind::bad_entry) == 0);
        CHECK(count_vue(outcome) == 0);

        Trajectory vue = run_script("two_switch.vue_k" + std::to_string(k) + ".jsonl");
        CHECK(vue.termination == TerminationReason::game_success);
        CHECK(count_vue(vue) == k);
        CHECK(count_kind(vue, EventErrorKind::bad_entry) == 0);
        CHECK(count_kind(vue, EventErrorKind::bad_outcome) == 0);
    }
}

TEST_CASE("the one-bad-round fixture loses and carries exactly one error") {
    Trajectory t = run_script("two_switch.one_bad3.jsonl");
    CHECK(t.termination == TerminationReason::game_lose);
    REQUIRE(t.rounds.size() == 3);
    CHECK(!t.rounds[0].has_errors());
    CHECK(t.rounds[1].has_errors());
    CHECK(!t.rounds[2].has_errors());
    CHECK(count_kind(t, EventErrorKind::bad_outcome, "E003") == 1);
    CHECK(count_vue(t) == 0);
    size_t clean = 0;
    for (const auto& r : t.rounds)
        if (!r.has_errors()) ++clean;
    CHECK(double(clean) / double(t.rounds.size()) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("same inputs give a byte-identical trajectory") {
    Trajectory a = run_script("two_switch.clean3.jsonl", 10, 99);
    Trajectory b = run_script("two_switch.clean3.jsonl", 10, 99);
    CHECK(trajectory_to_jsonl(a) == trajectory_to_jsonl(b));

    Trajectory c = run_script("two_switch.clean3.jsonl", 10, 100);
    // a different seed may pick different actions but never different physics
    CHECK(c.termination == TerminationReason::game_success);
}

TEST_CASE("persisted trajectories reproduce the online error counts") {
    Trajectory t = run_script("two_switch.one_bad3.jsonl");
    std::string path = temp_file("persist_roundtrip.traj.jsonl");
    write_trajectory(path, t);
    TrajectoryFile f = read_trajectory_file(path);
    CHECK(f.header["game_id"] == "two_switch");
    CHECK(f.header["model"] == "scripted");
    CHECK(f.end["termination"] == "game-lose");
    REQUIRE(f.rounds.size() == t.rounds.size());

    size_t stored_errors = 0, online_errors = 0, stored_vue = 0;
    for (const auto& r : f.rounds) {
        stored_errors += r["errors"]["event_condition_errors"].size();
        stored_vue += r["errors"]["variable_update_errors"].size();
        CHECK(r["errors"]["variables_total"] == 3);
    }
    for (const auto& r : t.rounds) online_errors += r.errors.event_condition_errors.size();
    CHECK(stored_errors == online_errors);
    CHECK(stored_vue == 0);

    // expected states are persisted as exact numeric text keyed by unique id
    CHECK(f.rounds[0]["expected_state"]["V001"] == "1");
    CHECK(f.rounds[2]["expected_state"]["H002"] == "1");
}

TEST_CASE("system prompt carries the game and the format contract") {
    std::string prompt = build_gs_system_prompt(two_switch_game());
    CHECK(prompt.find("EVENT PLAN") != std::string::npos);
    CHECK(prompt.find("NARRATION") != std::string::npos);
    CHECK(prompt.find("GAME STATE") != std::string::npos);
    CHECK(prompt.find("under 200 words") != std::string::npos);
    CHECK(prompt.find("exactly three candidate actions") != std::string::npos);
    CHECK(prompt.find("Warden Elm") != std::string::npos);
}
