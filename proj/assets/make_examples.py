#!/usr/bin/env python3
"""Regenerates the five example games used for few-shot game creation.

Each game is small enough to verify by hand and exercises a different part
of the mechanics: counters, multiple interacting variables, decreasing
resources with threshold checks, multiplication, and fractional steps.
"""

import json
import pathlib

OUT = pathlib.Path(__file__).parent / "gc_examples"
OUT.mkdir(exist_ok=True)


def trait(rate, description):
    return {"rate": rate, "description": description}


def variable(name, uid, description, initial, lo, hi):
    return {
        "value_name": name,
        "unique_id": uid,
        "description": description,
        "initial_value": str(initial),
        "min_value": str(lo),
        "max_value": str(hi),
    }


def flags():
    return [
        variable("has_succeeded", "H001", "Set when the player wins.", 0, 0, 1),
        variable("has_failed", "H002", "Set when the player loses.", 0, 0, 1),
    ]


def checks():
    return [
        {
            "check_name": "If Succeeded",
            "unique_id": "P001",
            "description": "The game ends in victory.",
            "condition": ["has_succeeded == 1"],
            "effect": ["has_succeeded = 1"],
        },
        {
            "check_name": "If Failed",
            "unique_id": "P002",
            "description": "The game ends in defeat.",
            "condition": ["has_failed == 1"],
            "effect": ["has_failed = 1"],
        },
    ]


def scene(name, uid, background, kind="location"):
    return {
        "scene_name": name,
        "unique_id": uid,
        "background_description": background,
        "scene_type": kind,
    }


def event(name, uid, scenes, enter, succeed, s_eff, f_eff, explain=None):
    e = {
        "event_name": name,
        "unique_id": uid,
        "scene": scenes,
        "entering_condition": enter,
        "succeed_condition": succeed,
        "succeed_effect": s_eff,
        "fail_effect": f_eff,
    }
    if explain:
        e["explanations"] = explain
    return e


GAMES = {}

GAMES["example_lighthouse.json"] = {
    "game_world": "Gannet Rock, a lighthouse island scoured by winter wind, three miles off the coast.",
    "player_name": "Tam",
    "player_description": "A relief keeper rowed out for one night, with no idea how much the lamp demands.",
    "main_npc_name": "Keeper Voss",
    "main_npc_description": {
        "text": "The resident keeper, weathered and exact, who measures trust in gallons of lamp oil.",
        "big5_personality_traits": {
            "openness": trait(2, "Suspicious of new methods."),
            "conscientiousness": trait(5, "Logs every wick trim to the minute."),
            "extraversion": trait(1, "Goes weeks without speaking."),
            "agreeableness": trait(3, "Fair, but slow to warm."),
            "neuroticism": trait(2, "Storms do not move her."),
        },
        "additional_facts": [
            "Voss has kept the lamp for eleven years.",
            "Voss once rowed through a gale to rescue two fishermen.",
            "Voss distrusts the mainland supply captain.",
        ],
    },
    "game_objectives": "Fill the reservoir and light the lamp before full dark.",
    "scenes": [
        scene("Oil Store", "S001", "A stone cellar of drums and the smell of paraffin."),
        scene("Lamp Room", "S002", "Glass on all sides; the wick waits in its brass collar."),
    ],
    "state_variables": [
        variable("oil", "V001", "Gallons of oil carried up to the reservoir.", 0, 0, 2),
    ],
    "hidden_variables": flags(),
    "events": [
        event(
            "Haul an oil can up the stair",
            "E001",
            ["S001"],
            ["oil < 2"],
            ["true"],
            ["oil += 1"],
            [],
            "Each trip up the tower adds a gallon.",
        ),
        event(
            "Light the lamp",
            "E002",
            ["S002"],
            ["oil >= 1"],
            ["oil == 2"],
            ["has_succeeded = 1"],
            ["has_failed = 1"],
            "A half-filled reservoir gutters out and the coast goes dark.",
        ),
    ],
    "pre_event_checks": checks(),
}

GAMES["example_night_ferry.json"] = {
    "game_world": "The river Skein at night, between two bridges, where the ferry Moth runs without lights.",
    "player_name": "Isla",
    "player_description": "A deckhand working off a passage, quick with knots and quicker with excuses.",
    "main_npc_name": "Petra Halloran",
    "main_npc_description": {
        "text": "Pilot of the Moth. She knows every toll, smuggler and sandbar on the water.",
        "big5_personality_traits": {
            "openness": trait(4, "Improvises routes nobody else would dare."),
            "conscientiousness": trait(3, "Keeps the engine perfect and the paperwork vague."),
            "extraversion": trait(3, "Talks exactly as much as a deal requires."),
            "agreeableness": trait(2, "Sentiment costs extra."),
            "neuroticism": trait(2, "Unbothered by patrol boats."),
        },
        "additional_facts": [
            "Petra owes the harbormaster a debt she will not name.",
            "The Moth has the fastest engine on the river.",
            "Petra never crosses the same toll twice in one night.",
        ],
    },
    "game_objectives": "Earn enough fares and goodwill to run the last lock before dawn.",
    "scenes": [
        scene("Night Market Pier", "S001", "Lantern stalls crowding the waterline."),
        scene("Toll Chain", "S002", "A rusted chain across the channel, and a hut with one lit window."),
        scene("The Last Lock", "S003", "Twin gates tall as houses, dripping in the dark."),
    ],
    "state_variables": [
        variable("fare", "V001", "Coin collected from passengers.", 0, 0, 4),
        variable("trust", "V002", "The toll keeper's goodwill.", 1, 0, 2),
    ],
    "hidden_variables": flags(),
    "events": [
        event(
            "Collect fares at the pier",
            "E001",
            ["S001"],
            ["fare <= 2"],
            ["true"],
            ["fare += 2"],
            [],
        ),
        event(
            "Pay off the toll keeper",
            "E002",
            ["S002"],
            ["fare >= 2"],
            ["trust >= 1"],
            ["fare -= 2", "trust += 1"],
            ["has_failed = 1"],
            "Coin buys goodwill; showing up broke ends the night.",
        ),
        event(
            "Run the last lock",
            "E003",
            ["S003"],
            ["trust >= 2"],
            ["fare >= 2"],
            ["has_succeeded = 1"],
            ["has_failed = 1"],
            "The lock opens for a trusted pilot with coin to spare.",
        ),
    ],
    "pre_event_checks": checks(),
}

GAMES["example_underhall.json"] = {
    "game_world": "The Underhall, a vaulted library beneath a ruined citadel, where books rewrite themselves at night.",
    "player_name": "Quill",
    "player_description": "An apprentice sent down with a lantern and strict instructions to touch nothing bare-handed.",
    "main_npc_name": "Serin Okoye",
    "main_npc_description": {
        "text": "The archivist. He speaks in a whisper and catalogues the shelves that can still be trusted.",
        "big5_personality_traits": {
            "openness": trait(5, "Reads everything, even what reads back."),
            "conscientiousness": trait(4, "His catalogue cards are immaculate."),
            "extraversion": trait(1, "Has never raised his voice in the stacks."),
            "agreeableness": trait(4, "Gentle with apprentices and books alike."),
            "neuroticism": trait(3, "The forgetting worries him."),
        },
        "additional_facts": [
            "Serin wears green-dyed cotton gloves to mark safe shelves.",
            "Serin believes the library is slowly forgetting itself.",
            "Serin catalogues by candlelight, never lamplight.",
        ],
    },
    "game_objectives": "Restore the catalogue to perfect order without reading anything forbidden.",
    "scenes": [
        scene("Glove Cabinet", "S001", "A shallow alcove of folded gloves, green for safe hands."),
        scene("The Restless Stacks", "S002", "Shelves that creak and shuffle when the candle gutters."),
    ],
    "state_variables": [
        variable("disorder", "V001", "How far the catalogue has drifted from true.", 3, 0, 3),
    ],
    "hidden_variables": flags(),
    "events": [
        event(
            "Don the green gloves",
            "E001",
            ["S001"],
            ["true"],
            ["true"],
            [],
            [],
            "Ritual first; the gloves permit shelving.",
        ),
        event(
            "Shelve the restless folios",
            "E002",
            ["S002"],
            ["disorder >= 1"],
            ["true"],
            ["disorder -= 1"],
            [],
        ),
        event(
            "Read a forbidden colophon",
            "E003",
            ["S002"],
            ["disorder >= 1"],
            ["false"],
            [],
            ["has_failed = 1"],
            "Curiosity always fails here.",
        ),
    ],
    "pre_event_checks": [
        {
            "check_name": "Catalogue restored",
            "unique_id": "P001",
            "description": "Perfect order ends the night in triumph.",
            "condition": ["disorder == 0"],
            "effect": ["has_succeeded = 1"],
        },
        {
            "check_name": "If Failed",
            "unique_id": "P002",
            "description": "The stacks close over the unwary.",
            "condition": ["has_failed == 1"],
            "effect": ["has_failed = 1"],
        },
    ],
}

GAMES["example_moon_garden.json"] = {
    "game_world": "The Garden of Hours, a walled terrace where flowers keep time instead of clocks.",
    "player_name": "Rook",
    "player_description": "A hired gardener who cannot tell a moon-lily from a minute-hand, yet.",
    "main_npc_name": "Warden Thorn",
    "main_npc_description": {
        "text": "The garden's warden, patient as compost and twice as stubborn about pruning.",
        "big5_personality_traits": {
            "openness": trait(3, "Set in his seasons."),
            "conscientiousness": trait(4, "Counts every petal at dusk."),
            "extraversion": trait(2, "Prefers plants to people."),
            "agreeableness": trait(4, "Kind to anything that grows."),
            "neuroticism": trait(1, "Nothing in a garden is an emergency."),
        },
        "additional_facts": [
            "Thorn has never left the garden walls.",
            "Thorn talks to the moon-lilies at midnight.",
            "Thorn keeps pruning shears he has never used.",
        ],
    },
    "game_objectives": "Bring the moon-lilies to full bloom and harvest them at their peak.",
    "scenes": [
        scene("Lily Terrace", "S001", "Pale blossoms that glow brighter as the hour grows late."),
        scene("Potting Shed", "S002", "Clay pots, moon charts, and a bench of careful tools."),
    ],
    "state_variables": [
        variable("bloom", "V001", "How far the moon-lilies have opened.", 1, 0, 8),
    ],
    "hidden_variables": flags(),
    "events": [
        event(
            "Water the moon-lilies",
            "E001",
            ["S001"],
            ["bloom <= 4"],
            ["true"],
            ["bloom *= 2"],
            [],
            "Moonlit water doubles the bloom.",
        ),
        event(
            "Harvest at full bloom",
            "E002",
            ["S001"],
            ["bloom >= 8"],
            ["true"],
            ["has_succeeded = 1"],
            [],
        ),
        event(
            "Prune recklessly",
            "E003",
            ["S002"],
            ["bloom >= 2"],
            ["bloom >= 6"],
            ["bloom -= 2"],
            ["has_failed = 1"],
            "Strong stems survive a trim; young ones do not.",
        ),
    ],
    "pre_event_checks": checks(),
}

GAMES["example_signal_tower.json"] = {
    "game_world": "A semaphore tower on the border ridge, last link in a chain of lights.",
    "player_name": "Corporal Ashe",
    "player_description": "A signals corporal posted alone with a hand dynamo and one message that matters.",
    "main_npc_name": "Sergeant Imke",
    "main_npc_description": {
        "text": "The voice on the speaking tube from the valley garrison, dry, precise, unsleeping.",
        "big5_personality_traits": {
            "openness": trait(2, "Regulations cover everything."),
            "conscientiousness": trait(5, "Reads back every order twice."),
            "extraversion": trait(2, "Speaks only through the tube."),
            "agreeableness": trait(3, "Professional warmth, no more."),
            "neuroticism": trait(4, "The silence between reports gnaws at her."),
        },
        "additional_facts": [
            "Imke has memorized the entire signal book.",
            "Imke once held the line through a three-day storm.",
            "Imke keeps the speaking tube polished like a bugle.",
        ],
    },
    "game_objectives": "Charge the capacitors fully and send the relief signal down the chain.",
    "scenes": [
        scene("Dynamo Room", "S001", "A crank, a flywheel, and a bank of humming jars."),
        scene("Signal Deck", "S002", "The great lamp and its shutters, aimed at the next ridge."),
    ],
    "state_variables": [
        variable("charge", "V001", "Capacitor charge as a fraction of full.", 0, 0, 1),
    ],
    "hidden_variables": flags(),
    "events": [
        event(
            "Crank the dynamo",
            "E001",
            ["S001"],
            ["charge < 1"],
            ["true"],
            ["charge += 0.25"],
            [],
            "Each session at the crank adds a quarter charge.",
        ),
        event(
            "Send the relief signal",
            "E002",
            ["S002"],
            ["charge >= 0.5"],
            ["charge >= 1"],
            ["has_succeeded = 1"],
            ["has_failed = 1"],
            "A weak pulse garbles the message beyond recovery.",
        ),
    ],
    "pre_event_checks": checks(),
}

for name, game in GAMES.items():
    path = OUT / name
    path.write_text(json.dumps(game, indent=2) + "\n")
    print("wrote", path.name)
