"""The worker's internal search engine.

Semantics are pinned to the orchestrator's native engine so that results
are node-for-node identical: pop order ascending (f, 0, insertion_index);
timeout then node-cap checked once at the top of every expansion iteration;
under the default policy a state becomes visited when pushed; successors
count as evaluated only when admitted past the duplicate check; failures
return the penalty objective. The score function receives a fresh
nested-list copy of the state on every call.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from typing import Callable

RUNTIME = "RUNTIME"
NON_NUMERIC_SCORE = "NON_NUMERIC_SCORE"


class EvaluationFailure(Exception):
    def __init__(self, error_code: str, message: str) -> None:
        super().__init__(message)
        self.error_code = error_code
        self.message = message


# -- domains ----------------------------------------------------------------


def spp_is_goal(tiles: tuple) -> bool:
    n = len(tiles)
    flat = [v for row in tiles for v in row]
    return flat == list(range(1, n * n)) + [0]


def spp_neighbors(tiles: tuple) -> list[tuple]:
    n = len(tiles)
    blank_r = blank_c = 0
    for r in range(n):
        for c in range(n):
            if tiles[r][c] == 0:
                blank_r, blank_c = r, c
    out = []
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        nr, nc = blank_r + dr, blank_c + dc
        if 0 <= nr < n and 0 <= nc < n:
            rows = [list(row) for row in tiles]
            rows[blank_r][blank_c], rows[nr][nc] = rows[nr][nc], rows[blank_r][blank_c]
            out.append(tuple(tuple(row) for row in rows))
    return out


def upmp_is_goal(lanes: tuple) -> bool:
    for lane in lanes:
        for i in range(len(lane) - 1):
            if lane[i] > lane[i + 1]:
                return False
    return True


def upmp_neighbors(lanes: tuple) -> list[tuple]:
    loaded = [i for i, lane in enumerate(lanes) if any(v != 0 for v in lane)]
    free = [i for i, lane in enumerate(lanes) if lane[0] == 0]
    out = []
    for src in loaded:
        for dst in free:
            if src == dst:
                continue
            new_lanes = list(lanes)
            lane = new_lanes[src]
            zeros = 0
            for v in lane:
                if v != 0:
                    break
                zeros += 1
            value = lane[zeros]
            new_lanes[src] = (0,) * (zeros + 1) + lane[zeros + 1 :]
            target = new_lanes[dst]
            zeros = 0
            for v in target:
                if v != 0:
                    break
                zeros += 1
            new_lanes[dst] = target[: zeros - 1] + (value,) + target[zeros:]
            out.append(tuple(new_lanes))
    return out


DOMAINS = {
    "spp": (spp_is_goal, spp_neighbors),
    "upmp": (upmp_is_goal, upmp_neighbors),
}


def state_from_instance(instance: dict) -> tuple[str, tuple]:
    problem = instance.get("problem")
    if problem == "spp":
        return "spp", tuple(tuple(int(v) for v in row) for row in instance["tiles"])
    if problem == "upmp":
        return "upmp", tuple(tuple(int(v) for v in lane) for lane in instance["lanes"])
    raise ValueError(f"unknown problem {problem!r}")


# -- search -----------------------------------------------------------------


def _score(fn: Callable, state: tuple) -> float:
    payload = [list(row) for row in state]
    try:
        value = fn(payload)
    except Exception as exc:
        raise EvaluationFailure(RUNTIME, f"score_state raised: {exc!r}") from exc
    if not isinstance(value, (int, float)):
        raise EvaluationFailure(
            NON_NUMERIC_SCORE, f"score_state returned {type(value).__name__}, not a number"
        )
    if isinstance(value, float) and math.isnan(value):
        raise EvaluationFailure(NON_NUMERIC_SCORE, "score_state returned NaN")
    return value


def evaluate(
    fn: Callable,
    problem: str,
    start: tuple,
    timeout_seconds: float,
    max_evaluated_nodes: int,
    max_moves_penalty: int,
    policy: str = "paper",
) -> dict:
    is_goal, neighbors = DOMAINS[problem]
    strict = policy == "strict"

    counter = itertools.count()
    root_h = _score(fn, start)
    # heap entries: (f, 0, insertion_index, g, state)
    open_list = [(root_h, 0, next(counter), 0, start)]
    visited = {start}
    best_g = {start: 0}
    closed: set = set()

    evaluated_nodes = 0
    start_time = time.monotonic()

    def result(solved: bool, moves: int, termination: str) -> dict:
        objective = moves if solved else max_moves_penalty
        return {
            "solved": solved,
            "moves_count": moves if solved else 0,
            "objective_value": objective,
            "evaluated_nodes": evaluated_nodes,
            "elapsed_seconds": time.monotonic() - start_time,
            "termination": termination,
        }

    while open_list:
        if time.monotonic() - start_time > timeout_seconds:
            return result(False, 0, "timeout")
        if evaluated_nodes > max_evaluated_nodes:
            return result(False, 0, "node_limit")

        _, _, _, g, state = heapq.heappop(open_list)

        if strict:
            if state in closed or g > best_g.get(state, g):
                continue
            closed.add(state)

        if is_goal(state):
            return result(True, g, "goal")

        for successor in neighbors(state):
            g2 = g + 1
            if strict:
                if successor in closed:
                    continue
                if g2 >= best_g.get(successor, math.inf):
                    continue
                best_g[successor] = g2
            else:
                if successor in visited:
                    continue
                visited.add(successor)
            evaluated_nodes += 1
            h = _score(fn, successor)
            heapq.heappush(open_list, (g2 + h, 0, next(counter), g2, successor))

    return result(False, 0, "exhausted")
