"""Best-first A* engine shared by every heuristic evaluation.

The driver is parameterized by a domain adapter (goal test, successor
generation, state serialization) and a scoring function. Node ordering,
visited-set placement, limit checks and failure objectives follow one fixed
contract so that results are reproducible across evaluation backends.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Hashable, Protocol


class DuplicatePolicy(str, Enum):
    # paper: a state becomes visited the moment its node is pushed; it is
    # never re-opened, even if a cheaper path to it appears later.
    PAPER = "paper"
    # strict: a state closes only on expansion; a cheaper open entry
    # supersedes an older one. Optimal for admissible, consistent scorers.
    STRICT = "strict"


class Termination(str, Enum):
    GOAL = "goal"
    TIMEOUT = "timeout"
    NODE_LIMIT = "node_limit"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchLimits:
    timeout_seconds: float
    max_evaluated_nodes: int
    max_moves_penalty: int

    def __post_init__(self) -> None:
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive")
        if self.max_evaluated_nodes < 0:
            raise ValueError("max_evaluated_nodes must be >= 0")
        if self.max_moves_penalty <= 0:
            raise ValueError("max_moves_penalty must be positive")


class DomainAdapter(Protocol):
    def is_goal(self, state: Any) -> bool: ...

    def neighbors(self, state: Any) -> list[tuple[Any, Any]]:
        """Successors as (move, state) pairs in a fixed, deterministic order."""

    def serialize(self, state: Any) -> Hashable: ...

    def is_valid(self, state: Any) -> bool: ...


class HeuristicError(Exception):
    """A score function raised, or returned a value that is not a finite
    int/float. Distinct from an unsolved search: the evaluation is void."""


@dataclass
class SearchNode:
    state: Any
    g: int
    h: float
    f: float
    parent: "SearchNode | None"
    move: Any
    insertion_index: int


@dataclass
class SearchResult:
    solved: bool
    moves: list
    objective_value: int
    evaluated_nodes: int
    elapsed_seconds: float
    termination: Termination


ScoreFn = Callable[[Any], float]


def _score(score_fn: ScoreFn, state: Any) -> float:
    try:
        value = score_fn(state)
    except Exception as exc:
        raise HeuristicError(f"score function raised: {exc!r}") from exc
    if not isinstance(value, (int, float)):
        raise HeuristicError(f"score function returned non-numeric {type(value).__name__}")
    if isinstance(value, float) and math.isnan(value):
        raise HeuristicError("score function returned NaN")
    return value


def reconstruct_path(node: SearchNode) -> list[tuple[Any, Any]]:
    """(move, state) pairs from the step after the root to the goal node."""
    path = []
    while node.parent is not None:
        path.append((node.move, node.state))
        node = node.parent
    path.reverse()
    return path


def astar(
    domain: DomainAdapter,
    score_fn: ScoreFn,
    start_state: Any,
    limits: SearchLimits,
    policy: DuplicatePolicy = DuplicatePolicy.PAPER,
) -> SearchResult:
    """Run A* from start_state until goal, limit, or exhaustion.

    Semantics pinned by the contract:
      * pop order is ascending (f, 0, insertion_index); the constant middle
        slot is the domain tie-break, 0 for both shipped domains;
      * both limits are checked once at the top of every expansion iteration,
        before the pop, so the goal test on an already-goal start precedes
        any limit effect;
      * evaluated_nodes counts only successors admitted past the duplicate
        check, never the root;
      * failures return objective_value = limits.max_moves_penalty and an
        empty move list.
    """
    if not domain.is_valid(start_state):
        raise ValueError("invalid start state for domain")

    counter = itertools.count()
    strict = policy is DuplicatePolicy.STRICT
    start_key = domain.serialize(start_state)

    root_h = _score(score_fn, start_state)
    root = SearchNode(start_state, 0, root_h, root_h, None, None, next(counter))
    open_list: list[tuple[float, int, int, SearchNode]] = [(root.f, 0, root.insertion_index, root)]

    best_g: dict[Hashable, int] = {start_key: 0}
    closed: set[Hashable] = set()
    visited: set[Hashable] = {start_key}

    evaluated_nodes = 0
    start_time = time.monotonic()

    def failure(termination: Termination) -> SearchResult:
        return SearchResult(
            solved=False,
            moves=[],
            objective_value=limits.max_moves_penalty,
            evaluated_nodes=evaluated_nodes,
            elapsed_seconds=time.monotonic() - start_time,
            termination=termination,
        )

    while open_list:
        if time.monotonic() - start_time > limits.timeout_seconds:
            return failure(Termination.TIMEOUT)
        if evaluated_nodes > limits.max_evaluated_nodes:
            return failure(Termination.NODE_LIMIT)

        _, _, _, current = heapq.heappop(open_list)

        if strict:
            key = domain.serialize(current.state)
            if key in closed or current.g > best_g.get(key, current.g):
                continue  # superseded entry
            closed.add(key)

        if domain.is_goal(current.state):
            moves = [move for move, _ in reconstruct_path(current)]
            return SearchResult(
                solved=True,
                moves=moves,
                objective_value=len(moves),
                evaluated_nodes=evaluated_nodes,
                elapsed_seconds=time.monotonic() - start_time,
                termination=Termination.GOAL,
            )

        for move, successor in domain.neighbors(current.state):
            skey = domain.serialize(successor)
            g2 = current.g + 1
            if strict:
                if skey in closed:
                    continue
                if g2 >= best_g.get(skey, math.inf):
                    continue
                best_g[skey] = g2
            else:
                if skey in visited:
                    continue
                visited.add(skey)
            evaluated_nodes += 1
            h = _score(score_fn, successor)
            node = SearchNode(successor, g2, h, g2 + h, current, move, next(counter))
            heapq.heappush(open_list, (node.f, 0, node.insertion_index, node))

    return failure(Termination.EXHAUSTED)
