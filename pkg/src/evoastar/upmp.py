"""Unit-load pre-marshalling: single-bay warehouse lanes, moves, blocking
semantics, and instance generation.

A state is a list of fixed-depth lanes. Index 0 of a lane is the outermost
(access-side) slot; 0 marks an empty slot and 1..K are priority classes with
1 the highest priority. Within a lane all zeros precede all loads. The goal
is every lane non-decreasing from the access side, i.e. no load sits in
front of a strictly higher-priority one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .rng import SplitMix64

Lanes = tuple[tuple[int, ...], ...]


class LaneMove(NamedTuple):
    from_lane: int
    to_lane: int


@dataclass(frozen=True)
class WarehouseState:
    lanes: Lanes
    depth: int
    num_classes: int


def from_lanes(lanes: Iterable[Iterable[int]], num_classes: int) -> WarehouseState:
    rows = tuple(tuple(int(v) for v in lane) for lane in lanes)
    if not rows:
        raise ValueError("at least one lane required")
    state = WarehouseState(rows, len(rows[0]), num_classes)
    if not is_valid(state):
        raise ValueError(f"not a valid warehouse state: {rows!r}")
    return state


def is_valid(state: WarehouseState) -> bool:
    if state.depth < 1 or state.num_classes < 1 or not state.lanes:
        return False
    for lane in state.lanes:
        if len(lane) != state.depth:
            return False
        if any(v < 0 or v > state.num_classes for v in lane):
            return False
        seen_load = False
        for v in lane:
            if v != 0:
                seen_load = True
            elif seen_load:
                return False  # zero after a load breaks the prefix rule
    return True


def is_goal(state: WarehouseState) -> bool:
    for lane in state.lanes:
        for i in range(len(lane) - 1):
            if lane[i] > lane[i + 1]:
                return False
    return True


def _remove_load(lane: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Pop the outermost load, shifting a leading zero in."""
    zeros = 0
    while zeros < len(lane) and lane[zeros] == 0:
        zeros += 1
    if zeros == len(lane):
        raise ValueError("cannot remove from an empty lane")
    value = lane[zeros]
    return (0,) * (zeros + 1) + lane[zeros + 1 :], value


def _add_load(lane: tuple[int, ...], value: int) -> tuple[int, ...]:
    """Place a load into the deepest empty slot, keeping the zero prefix."""
    zeros = 0
    while zeros < len(lane) and lane[zeros] == 0:
        zeros += 1
    if zeros == 0:
        raise ValueError("cannot add to a full lane")
    return lane[: zeros - 1] + (value,) + lane[zeros:]


def apply_move(state: WarehouseState, move: LaneMove) -> WarehouseState:
    lanes = list(state.lanes)
    source, value = _remove_load(lanes[move.from_lane])
    lanes[move.from_lane] = source
    lanes[move.to_lane] = _add_load(lanes[move.to_lane], value)
    return WarehouseState(tuple(lanes), state.depth, state.num_classes)


def neighbors(state: WarehouseState) -> list[tuple[LaneMove, WarehouseState]]:
    """One successor per (loaded lane, lane with an empty slot) ordered pair,
    source ascending then target ascending."""
    loaded = [i for i, lane in enumerate(state.lanes) if any(v != 0 for v in lane)]
    # zero-prefix rule: a lane has an empty slot iff its outermost slot is 0
    free = [i for i, lane in enumerate(state.lanes) if lane[0] == 0]
    out = []
    for src in loaded:
        for dst in free:
            if src == dst:
                continue
            move = LaneMove(src, dst)
            out.append((move, apply_move(state, move)))
    return out


def blocking_count(state: WarehouseState) -> int:
    """Loads with a strictly higher-priority load somewhere deeper in the
    same lane. Each such load must move at least once, so the count is an
    admissible lower bound on moves."""
    total = 0
    for lane in state.lanes:
        deeper_min: int | None = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                total += 1
            deeper_min = v if deeper_min is None else min(deeper_min, v)
    return total


def generate(
    num_lanes: int,
    depth: int,
    num_classes: int,
    fill_fraction: float,
    seed: int,
) -> WarehouseState:
    """Seeded random layout: round(num_lanes*depth*fill_fraction) loads with
    uniform classes, dealt to lanes by a full-bay shuffle and packed to lane
    bottoms. Redrawn (stream advancing) while the layout is already sorted.
    """
    if num_lanes < 1 or depth < 1 or num_classes < 1:
        raise ValueError("num_lanes, depth and num_classes must be >= 1")
    if not 0.0 < fill_fraction < 1.0:
        raise ValueError("fill_fraction must be strictly between 0 and 1")
    cells = num_lanes * depth
    num_loads = round(cells * fill_fraction)
    if num_loads < 1:
        raise ValueError("fill too low: no loads to place")
    if num_loads >= cells:
        raise ValueError("fill too high: no empty slot would remain")
    # a non-goal state needs two loads of different classes stacked in one
    # lane; without that possibility the redraw loop would never finish
    if depth < 2 or num_classes < 2 or num_loads < 2:
        raise ValueError(
            "generation needs depth >= 2, num_classes >= 2 and at least two "
            "loads, otherwise every layout is already sorted"
        )

    rng = SplitMix64(seed)
    while True:
        values = [1 + rng.randrange(num_classes) for _ in range(num_loads)]
        values += [0] * (cells - num_loads)
        rng.shuffle(values)
        lanes = []
        for i in range(num_lanes):
            chunk = values[i * depth : (i + 1) * depth]
            loads = [v for v in chunk if v != 0]
            lanes.append((0,) * (depth - len(loads)) + tuple(loads))
        state = WarehouseState(tuple(lanes), depth, num_classes)
        if not is_goal(state):
            return state


class WarehouseDomain:
    """Adapter binding the warehouse functions to the search engine."""

    def is_goal(self, state: WarehouseState) -> bool:
        return is_goal(state)

    def neighbors(self, state: WarehouseState) -> list[tuple[LaneMove, WarehouseState]]:
        return neighbors(state)

    def serialize(self, state: WarehouseState) -> Lanes:
        return state.lanes

    def is_valid(self, state: WarehouseState) -> bool:
        return is_valid(state)
