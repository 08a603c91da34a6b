"""Instance file reading and writing.

One JSON file per instance, with fixed field names so externally published
instances can be dropped in verbatim:

  sliding puzzle: {"problem": "spp", "n", "seed", "shuffle_moves", "tiles"}
  pre-marshalling: {"problem": "upmp", "seed", "depth", "num_classes", "lanes"}

Writing is byte-deterministic: same record, same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import spp, upmp


class InstanceError(ValueError):
    """Malformed or mislabeled instance record."""


@dataclass(frozen=True)
class Instance:
    problem: str
    seed: int
    state: Any
    record: dict


def _dump(record: dict) -> str:
    return json.dumps(record, indent=2) + "\n"


def spp_record(state: spp.PuzzleState, seed: int, shuffle_moves: int) -> dict:
    return {
        "problem": "spp",
        "n": state.n,
        "seed": seed,
        "shuffle_moves": shuffle_moves,
        "tiles": [list(row) for row in state.tiles],
    }


def upmp_record(state: upmp.WarehouseState, seed: int) -> dict:
    return {
        "problem": "upmp",
        "seed": seed,
        "depth": state.depth,
        "num_classes": state.num_classes,
        "lanes": [list(lane) for lane in state.lanes],
    }


def from_record(record: dict) -> Instance:
    problem = record.get("problem")
    try:
        if problem == "spp":
            state = spp.from_rows(record["tiles"])
            if state.n != int(record["n"]):
                raise InstanceError("tiles do not match declared n")
            return Instance("spp", int(record["seed"]), state, record)
        if problem == "upmp":
            state = upmp.from_lanes(record["lanes"], int(record["num_classes"]))
            if state.depth != int(record["depth"]):
                raise InstanceError("lanes do not match declared depth")
            return Instance("upmp", int(record["seed"]), state, record)
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed instance record: {exc}") from exc
    raise InstanceError(f"unknown problem {problem!r}")


def write_instance(path: str | Path, record: dict) -> Path:
    path = Path(path)
    from_record(record)  # validate before writing
    path.write_text(_dump(record), encoding="utf-8")
    return path


def load_instance(path: str | Path) -> Instance:
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from exc
    return from_record(record)
