"""Independent brute-force oracles for the test suite.

Everything here is plain breadth-first search over the domain move model;
no code from the A* engine or the heuristics is involved, so these values
can be trusted to check them.
"""

from __future__ import annotations

from collections import deque
from itertools import product

from evoastar import spp, upmp


def spp_distance_table(n: int) -> dict[tuple, int]:
    """Exact distance-to-goal for every state reachable from the goal,
    by backward BFS (slide moves are their own inverses as a set)."""
    start = spp.goal_state(n)
    dist = {start.tiles: 0}
    frontier = deque([start])
    while frontier:
        state = frontier.popleft()
        d = dist[state.tiles]
        for _, nxt in spp.neighbors(state):
            if nxt.tiles not in dist:
                dist[nxt.tiles] = d + 1
                frontier.append(nxt)
    return dist


def spp_bfs_optimum(state: spp.PuzzleState) -> int | None:
    """Forward BFS from one state; None when the goal is unreachable."""
    if spp.is_goal(state):
        return 0
    seen = {state.tiles}
    frontier = deque([(state, 0)])
    while frontier:
        current, d = frontier.popleft()
        for _, nxt in spp.neighbors(current):
            if nxt.tiles in seen:
                continue
            if spp.is_goal(nxt):
                return d + 1
            seen.add(nxt.tiles)
            frontier.append((nxt, d + 1))
    return None


def enumerate_upmp_lanes(depth: int, num_classes: int) -> list[tuple[int, ...]]:
    """All legal single lanes: zeros prefix, loads from 1..num_classes."""
    lanes = []
    for zeros in range(depth + 1):
        for loads in product(range(1, num_classes + 1), repeat=depth - zeros):
            lanes.append((0,) * zeros + loads)
    return lanes


def upmp_distance_table(num_lanes: int, depth: int, num_classes: int) -> dict[tuple, int]:
    """Exact distance-to-goal for every enumerable state, by multi-source
    backward BFS from the set of sorted states. Every relocation is
    reversible (the moved load always ends up outermost in its new lane),
    so backward BFS over forward moves is exact. States absent from the
    table cannot reach a goal."""
    lanes = enumerate_upmp_lanes(depth, num_classes)
    dist: dict[tuple, int] = {}
    frontier: deque[upmp.WarehouseState] = deque()
    for combo in product(lanes, repeat=num_lanes):
        state = upmp.WarehouseState(combo, depth, num_classes)
        if upmp.is_goal(state):
            dist[combo] = 0
            frontier.append(state)
    while frontier:
        state = frontier.popleft()
        d = dist[state.lanes]
        for _, nxt in upmp.neighbors(state):
            if nxt.lanes not in dist:
                dist[nxt.lanes] = d + 1
                frontier.append(nxt)
    return dist


def canonical_upmp_states(depth: int, num_classes: int, num_lanes: int) -> list[upmp.WarehouseState]:
    """One representative per lane multiset (move costs are invariant under
    lane permutation), non-goal states only."""
    lanes = enumerate_upmp_lanes(depth, num_classes)
    out = []
    seen = set()
    for combo in product(lanes, repeat=num_lanes):
        canon = tuple(sorted(combo))
        if canon in seen:
            continue
        seen.add(canon)
        state = upmp.WarehouseState(canon, depth, num_classes)
        if not upmp.is_goal(state):
            out.append(state)
    return out
