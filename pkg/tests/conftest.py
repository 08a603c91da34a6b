from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import spp_distance_table, upmp_distance_table  # noqa: E402


@pytest.fixture(scope="session")
def spp3_distances() -> dict[tuple, int]:
    """Distance-to-goal for every reachable 3x3 puzzle state."""
    return spp_distance_table(3)


@pytest.fixture(scope="session")
def upmp3_distances() -> dict[tuple, int]:
    """Distance-to-goal for every 3-lane, depth-3, 3-class state."""
    return upmp_distance_table(3, 3, 3)
