"""Registry wiring each search problem to its domain adapter, generator,
lower bound, built-in heuristics, and per-problem evaluation defaults."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from . import instances, spp, upmp
from .search import DomainAdapter, SearchLimits

PROBLEMS = ("spp", "upmp")


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    domain: DomainAdapter
    lower_bound: Callable[[Any], int]
    builtin_heuristics: dict[str, Callable[[Any], float]]
    default_limits: SearchLimits
    default_instance_params: dict
    generate: Callable[..., Any]
    make_record: Callable[..., dict]
    to_payload: Callable[[Any], list]


def _spp_generate(seed: int, n: int = 20, shuffle_moves: int = 200) -> spp.PuzzleState:
    return spp.generate(n, shuffle_moves, seed)


def _spp_record(state: spp.PuzzleState, seed: int, n: int = 20, shuffle_moves: int = 200) -> dict:
    return instances.spp_record(state, seed, shuffle_moves)


def _upmp_generate(
    seed: int,
    num_lanes: int = 5,
    depth: int = 5,
    num_classes: int = 5,
    fill_fraction: float = 0.6,
) -> upmp.WarehouseState:
    return upmp.generate(num_lanes, depth, num_classes, fill_fraction, seed)


def _upmp_record(state: upmp.WarehouseState, seed: int, **_params) -> dict:
    return instances.upmp_record(state, seed)


_SPP = ProblemSpec(
    name="spp",
    domain=spp.PuzzleDomain(),
    lower_bound=spp.misplaced_tiles,
    builtin_heuristics={
        "misplaced": spp.misplaced_tiles,
        "manhattan": spp.manhattan,
        "linear_conflict": spp.linear_conflict,
    },
    default_limits=SearchLimits(
        timeout_seconds=60.0, max_evaluated_nodes=1_000_000, max_moves_penalty=200
    ),
    default_instance_params={"n": 20, "shuffle_moves": 200},
    generate=_spp_generate,
    make_record=_spp_record,
    to_payload=lambda state: [list(row) for row in state.tiles],
)

_UPMP = ProblemSpec(
    name="upmp",
    domain=upmp.WarehouseDomain(),
    lower_bound=upmp.blocking_count,
    builtin_heuristics={
        "blocking_count": upmp.blocking_count,
    },
    default_limits=SearchLimits(
        timeout_seconds=60.0, max_evaluated_nodes=100_000, max_moves_penalty=100
    ),
    default_instance_params={
        "num_lanes": 5,
        "depth": 5,
        "num_classes": 5,
        "fill_fraction": 0.6,
    },
    generate=_upmp_generate,
    make_record=_upmp_record,
    to_payload=lambda state: [list(lane) for lane in state.lanes],
)


def get_problem(name: str) -> ProblemSpec:
    if name == "spp":
        return _SPP
    if name == "upmp":
        return _UPMP
    raise ValueError(f"unknown problem {name!r}; expected one of {PROBLEMS}")
