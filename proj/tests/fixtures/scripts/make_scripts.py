#!/usr/bin/env python3
"""Regenerates the scripted engine/judge replies used by the test suite.

The scripts replay a game of two_switch.json. Expected states are easy to
track by hand: progress goes 0 -> 1 (E001) -> 2 (E003), then E002 ends the
game. Planted errors live in otherwise empty "slot" rounds so each plant
flags exactly one error of one kind.
"""

import json
import pathlib

HERE = pathlib.Path(__file__).parent

ACTIONS = '["Head for the second bank", "Ask Elm about the failsafe", "Check the gauges"]'

NARRATIONS = [
    "ELM: Steady hands now. JUN drives the first switch bank home and the dynamos answer with a rising whine.",
    "The hall hums. ELM walks the catwalk, counting relays under his breath while JUN waits for the signal.",
    "Steam sighs through the pipes overhead. Nothing moves but the needles trembling at half charge.",
    "ELM taps a gauge twice and nods to himself. The station holds its breath around them.",
    "JUN leans into the second bank. The knife switches bite, and the busbars light with a low orange glow.",
    "At the control room, JUN throws the master lever. Across the city, window after window flickers on.",
]


def round_text(plan, narration, state, actions=ACTIONS):
    plan_json = json.dumps(plan)
    state_json = json.dumps({k: str(v) for k, v in state.items()})
    return (
        "```EVENT PLAN\n" + plan_json + "\n```\n"
        "```NARRATION\n" + narration + "\n" + actions + "\n```\n"
        "```GAME STATE\n" + state_json + "\n```\n"
    )


def start(eid):
    return {"event_id": eid, "phase": "start"}


def end(eid, outcome):
    return {"event_id": eid, "phase": "end", "outcome": outcome}


def state(progress, succeeded=0, failed=0):
    return {"progress": progress, "has_succeeded": succeeded, "has_failed": failed}


def write_script(name, rounds):
    path = HERE / name
    with path.open("w") as f:
        for r in rounds:
            f.write(json.dumps({"response": r}) + "\n")
    print("wrote", path.name, f"({len(rounds)} rounds)")


# --- clean 3-round run ending in success ------------------------------------
clean3 = [
    round_text([start("E001"), end("E001", "success")], NARRATIONS[0], state(1)),
    round_text([start("E003"), end("E003", "success")], NARRATIONS[4], state(2)),
    round_text([start("E002"), end("E002", "success")], NARRATIONS[5], state(2, succeeded=1)),
]
write_script("two_switch.clean3.jsonl", clean3)

# --- 3-round run with one bad round (bad-outcome in round 2) -----------------
# E003 really succeeds (succeed_condition is "true"), so claiming failure is
# one event-condition error; fail_effect is empty, so progress stays 1 and
# round 3 must end E002 with "failure" (progress != 2), which is correct and
# terminates the game with a loss.
one_bad3 = [
    round_text([start("E001"), end("E001", "success")], NARRATIONS[0], state(1)),
    round_text([start("E003"), end("E003", "failure")], NARRATIONS[2], state(1)),
    round_text([start("E002"), end("E002", "failure")], NARRATIONS[3], state(1, failed=1)),
]
write_script("two_switch.one_bad3.jsonl", one_bad3)

# --- 6-round base with three plantable slot rounds ---------------------------
# r1: E001 -> progress 1 | r2..r4: slots at progress 1 | r5: E003 -> 2 | r6: E002 success
def base6(slot_plans, slot_states=None, slot_narrs=None):
    slot_states = slot_states or [state(1)] * 3
    slot_narrs = slot_narrs or [NARRATIONS[1], NARRATIONS[2], NARRATIONS[3]]
    return [
        round_text([start("E001"), end("E001", "success")], NARRATIONS[0], state(1)),
        round_text(slot_plans[0], slot_narrs[0], slot_states[0]),
        round_text(slot_plans[1], slot_narrs[1], slot_states[1]),
        round_text(slot_plans[2], slot_narrs[2], slot_states[2]),
        round_text([start("E003"), end("E003", "success")], NARRATIONS[4], state(2)),
        round_text([start("E002"), end("E002", "success")], NARRATIONS[5], state(2, succeeded=1)),
    ]


write_script("two_switch.planted_k0.jsonl", base6([[], [], []]))

# bad-entry plants: starting E001 at progress=1 violates its entering
# condition; the event stays open and has no effect.
BAD_ENTRY = [start("E001")]
# bad-outcome plants: E003 is enterable at progress=1 and always succeeds;
# claiming failure is one outcome error and applies the empty fail_effect.
BAD_OUTCOME = [start("E003"), end("E003", "failure")]

for k in (1, 2, 3):
    plans = [BAD_ENTRY if i < k else [] for i in range(3)]
    write_script(f"two_switch.bad_entry_k{k}.jsonl", base6(plans))
    plans = [BAD_OUTCOME if i < k else [] for i in range(3)]
    write_script(f"two_switch.bad_outcome_k{k}.jsonl", base6(plans))
    # variable-update plants: report progress=7 in the first k slots
    states = [state(7) if i < k else state(1) for i in range(3)]
    write_script(f"two_switch.vue_k{k}.jsonl", base6([[], [], []], slot_states=states))

# --- never-terminating script for the round cap ------------------------------
idle = round_text([], NARRATIONS[2], state(0))
write_script("two_switch.idle12.jsonl", [idle] * 12)

# --- engine that emits unparseable text every round ---------------------------
write_script("two_switch.garbled.jsonl", ["The dynamos sing a song with no structure at all."] * 12)

# --- judge replies for the clean3 trajectory ---------------------------------
# Order per trajectory: per round (ACT diversity, ACT relevance, ACT
# understandability, INT), then FAC, TIPI, PER^d.
judge = []
for _ in range(3):
    judge.append(json.dumps({"reason": "each option opens a different path", "score": 5}))
    judge.append(json.dumps({"reason": "choices fit the scene", "score": 4}))
    judge.append(json.dumps({"reason": "some phrasing is terse", "score": 3}))
    judge.append(json.dumps({"score": 3, "explanation": "workmanlike but steady"}))
judge.append(json.dumps([
    {"fact_id": "F1", "judgement": "align", "explanation": "thirty years on the catwalks"},
    {"fact_id": "F2", "judgement": "align", "explanation": "the missing fingers are shown"},
    {"fact_id": "F3", "judgement": "align", "explanation": "he waves the supervisor off"},
    {"fact_id": "F4", "judgement": "contradict", "explanation": "he claims to know no tunnels"},
]))
judge.append(json.dumps({k: 4 for k in "ABCDEFGHIJ"}))
judge.append(json.dumps({t: {"score": 4, "explanation": "fits"} for t in
                         ["openness", "conscientiousness", "extraversion",
                          "agreeableness", "neuroticism"]}))
with (HERE / "two_switch.judge.jsonl").open("w") as f:
    for reply in judge:
        f.write(json.dumps({"response": reply}) + "\n")
print("wrote two_switch.judge.jsonl", f"({len(judge)} replies)")
