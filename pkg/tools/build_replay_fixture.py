#!/usr/bin/env python3
"""Record the shipped replay fixture for configs/replay_small.yaml.

Drives a full evolution run with a scripted response pool standing in for
the LLM, recording every (prompt, response) pair. The recorded fixture is
written into the package data directory; afterwards the same run replays
byte-identically from the fixture alone.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from evoastar.config import load_config
from evoastar.evolution import EvolutionEngine, InProcessEvaluator
from evoastar.llm import CompletionResult, RecordingClient, estimate_tokens
from evoastar.refsources import UPMP_BLOCKING_COUNT

REPO = Path(__file__).resolve().parents[1]
FIXTURE_PATH = REPO / "src" / "evoastar" / "data" / "replay" / "upmp_small.json"
CONFIG_PATH = REPO / "configs" / "replay_small.yaml"


def response(thought: str, code: str) -> str:
    return "{" + thought + "}\n```python\n" + code + "\n```\n"


VALID_RESPONSES = [
    response("Counts loads that sit in front of a strictly higher-priority load.", UPMP_BLOCKING_COUNT.strip()),
    response(
        "Counts blocking loads and adds a small charge per adjacent out-of-order pair.",
        """\
def score_state(state):
    score = 0.0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                score += 1.0
            if deeper_min is None or v < deeper_min:
                deeper_min = v
        for i in range(len(lane) - 1):
            if lane[i] > lane[i + 1] and lane[i + 1] != 0:
                score += 0.1
    return score""",
    ),
    response(
        "Weights each blocking load by how deep it sits in its lane.",
        """\
def score_state(state):
    score = 0.0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                score += 1.0 + 0.05 * (len(lane) - i)
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return score""",
    ),
    response(
        "Counts lanes that are not sorted by priority.",
        """\
def score_state(state):
    unsorted_lanes = 0
    for lane in state:
        for i in range(len(lane) - 1):
            if lane[i] > lane[i + 1]:
                unsorted_lanes += 1
                break
    return unsorted_lanes""",
    ),
    response(
        "Counts every out-of-order pair of loads within each lane.",
        """\
def score_state(state):
    inversions = 0
    for lane in state:
        for i in range(len(lane)):
            for j in range(i + 1, len(lane)):
                if lane[i] != 0 and lane[j] != 0 and lane[i] > lane[j]:
                    inversions += 1
    return inversions""",
    ),
    response(
        "Squares the blocking count to sharpen differences between states.",
        """\
def score_state(state):
    blocking = 0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                blocking += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return blocking * blocking""",
    ),
    response(
        "Doubles the blocking count so ties break toward shorter paths.",
        """\
def score_state(state):
    blocking = 0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                blocking += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return 2 * blocking""",
    ),
    response(
        "Takes the worst single lane's blocking count.",
        """\
def score_state(state):
    worst = 0
    for lane in state:
        blocking = 0
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                blocking += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
        worst = max(worst, blocking)
    return worst""",
    ),
    response(
        "Counts loads that differ from the lane sorted by priority.",
        """\
def score_state(state):
    misplaced = 0
    for lane in state:
        ordered = sorted(lane)
        for i in range(len(lane)):
            if lane[i] != ordered[i]:
                misplaced += 1
    return misplaced""",
    ),
    response(
        "Halves the in-lane inversion count for a softer gradient.",
        """\
def score_state(state):
    inversions = 0
    for lane in state:
        for i in range(len(lane)):
            for j in range(i + 1, len(lane)):
                if lane[i] != 0 and lane[j] != 0 and lane[i] > lane[j]:
                    inversions += 1
    return 0.5 * inversions""",
    ),
    response(
        "Adds blocking count and the number of unsorted lanes.",
        """\
def score_state(state):
    blocking = 0
    unsorted_lanes = 0
    for lane in state:
        lane_blocked = 0
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                lane_blocked += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
        blocking += lane_blocked
        if lane_blocked:
            unsorted_lanes += 1
    return blocking + unsorted_lanes""",
    ),
    response(
        "Sums positive priority gaps between each load and the best load behind it.",
        """\
def score_state(state):
    score = 0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                score += v - deeper_min
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return score""",
    ),
    response(
        "Discounts blocking slightly per available empty slot.",
        """\
def score_state(state):
    blocking = 0
    empties = 0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                empties += 1
                continue
            if deeper_min is not None and deeper_min < v:
                blocking += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return blocking - 0.01 * empties""",
    ),
    response(
        "Counts adjacent out-of-order pairs only.",
        """\
def score_state(state):
    score = 0
    for lane in state:
        for i in range(len(lane) - 1):
            if lane[i] > lane[i + 1]:
                score += 1
    return score""",
    ),
]

# two responses the loop must log and skip: a validation failure (while
# loop) and a parse failure (no brace-delimited description)
INVALID_RESPONSES = [
    response(
        "Uses a while loop, which the constraints forbid.",
        """\
def score_state(state):
    score = 0
    i = 0
    while i < len(state):
        score += len(state[i])
        i += 1
    return score""",
    ),
    "Here is a heuristic without the required description format:\n"
    "```python\ndef score_state(state):\n    return 0\n```\n",
]

# first ten (initialization) are valid; the tail mixes in the two bad ones
POOL = VALID_RESPONSES[:10] + [
    INVALID_RESPONSES[0],
    VALID_RESPONSES[10],
    INVALID_RESPONSES[1],
    VALID_RESPONSES[11],
    VALID_RESPONSES[12],
    VALID_RESPONSES[13],
]


class ScriptedClient:
    """Cycles through the response pool, ignoring the prompt text."""

    def __init__(self, pool: list[str]) -> None:
        self.pool = pool
        self.calls = 0

    def complete(self, request) -> CompletionResult:
        text = self.pool[self.calls % len(self.pool)]
        self.calls += 1
        return CompletionResult(
            text=text,
            input_tokens=estimate_tokens(request.prompt),
            output_tokens=estimate_tokens(text),
            latency_seconds=0.0,
            estimated=True,
        )


def main() -> None:
    config = load_config(CONFIG_PATH)
    recorder = RecordingClient(ScriptedClient(POOL))
    with tempfile.TemporaryDirectory() as tmp:
        engine = EvolutionEngine(
            config, client=recorder, evaluator=InProcessEvaluator(config), run_dir=tmp
        )
        population = engine.run()
    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    recorder.save(FIXTURE_PATH)
    print(
        f"recorded {len(recorder.entries)} prompt/response pairs "
        f"({engine.prompt_index} prompts issued), best fitness "
        f"{population.best_fitness:.6f}"
    )
    print(f"fixture written to {FIXTURE_PATH}")


if __name__ == "__main__":
    main()
