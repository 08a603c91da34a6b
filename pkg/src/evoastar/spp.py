"""Sliding puzzle: state model, moves, instance generation, and the
literature baselines (misplaced tiles, Manhattan distance, linear conflict).

States are immutable n-by-n grids holding a permutation of 0..n*n-1 with 0 as
the blank. Row index 0 is the top row; the goal reads 1, 2, ..., n*n-1, 0 in
row-major order. A move names the blank's displacement: 'U' slides the tile
above the blank down into it, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .rng import SplitMix64

# Blank displacement per move name, in the fixed generation order.
DIRECTIONS: tuple[tuple[int, int, str], ...] = (
    (-1, 0, "U"),
    (1, 0, "D"),
    (0, -1, "L"),
    (0, 1, "R"),
)

INVERSE_MOVE = {"U": "D", "D": "U", "L": "R", "R": "L"}

Grid = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PuzzleState:
    n: int
    tiles: Grid


def from_rows(rows: Iterable[Iterable[int]]) -> PuzzleState:
    """Build and validate a state from nested sequences."""
    tiles = tuple(tuple(int(v) for v in row) for row in rows)
    state = PuzzleState(len(tiles), tiles)
    if not is_valid(state):
        raise ValueError(f"not a valid puzzle grid: {tiles!r}")
    return state


def is_valid(state: PuzzleState) -> bool:
    n = state.n
    if n < 2 or len(state.tiles) != n or any(len(row) != n for row in state.tiles):
        return False
    flat = [v for row in state.tiles for v in row]
    return sorted(flat) == list(range(n * n))


def goal_state(n: int) -> PuzzleState:
    values = list(range(1, n * n)) + [0]
    rows = tuple(tuple(values[r * n : (r + 1) * n]) for r in range(n))
    return PuzzleState(n, rows)


def is_goal(state: PuzzleState) -> bool:
    flat = [v for row in state.tiles for v in row]
    return flat == list(range(1, state.n * state.n)) + [0]


def find_blank(state: PuzzleState) -> tuple[int, int]:
    for r, row in enumerate(state.tiles):
        for c, v in enumerate(row):
            if v == 0:
                return r, c
    raise ValueError("state has no blank")


def apply_move(state: PuzzleState, move: str) -> PuzzleState:
    n = state.n
    r, c = find_blank(state)
    for dr, dc, name in DIRECTIONS:
        if name != move:
            continue
        nr, nc = r + dr, c + dc
        if not (0 <= nr < n and 0 <= nc < n):
            raise ValueError(f"move {move} is out of bounds")
        return _swapped(state, r, c, nr, nc)
    raise ValueError(f"unknown move {move!r}")


def _swapped(state: PuzzleState, r: int, c: int, nr: int, nc: int) -> PuzzleState:
    rows = [list(row) for row in state.tiles]
    rows[r][c], rows[nr][nc] = rows[nr][nc], rows[r][c]
    return PuzzleState(state.n, tuple(tuple(row) for row in rows))


def neighbors(state: PuzzleState) -> list[tuple[str, PuzzleState]]:
    """Successors in fixed U, D, L, R order; 2 to 4 of them."""
    n = state.n
    r, c = find_blank(state)
    out = []
    for dr, dc, move in DIRECTIONS:
        nr, nc = r + dr, c + dc
        if 0 <= nr < n and 0 <= nc < n:
            out.append((move, _swapped(state, r, c, nr, nc)))
    return out


def generate(n: int, shuffle_moves: int, seed: int, allow_inverse: bool = False) -> PuzzleState:
    """Seeded random walk of shuffle_moves steps back from the goal.

    The immediate inverse of the previous move is forbidden unless
    allow_inverse is set (long walks otherwise drift back toward the goal).
    If the walk ends on the goal it simply keeps stepping, so the result is
    always a non-goal state solvable in at most shuffle_moves moves.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if shuffle_moves < 1:
        raise ValueError("shuffle_moves must be >= 1")
    rng = SplitMix64(seed)
    state = goal_state(n)
    prev: str | None = None
    steps = 0
    while steps < shuffle_moves or is_goal(state):
        r, c = find_blank(state)
        legal = [
            move
            for dr, dc, move in DIRECTIONS
            if 0 <= r + dr < n and 0 <= c + dc < n
        ]
        if prev is not None and not allow_inverse:
            legal = [m for m in legal if m != INVERSE_MOVE[prev]]
        move = legal[rng.randrange(len(legal))]
        state = apply_move(state, move)
        prev = move
        steps += 1
    return state


def misplaced_tiles(state: PuzzleState) -> int:
    """Non-blank tiles away from their goal cell; the blank is excluded to
    keep the count admissible."""
    n = state.n
    count = 0
    for r, row in enumerate(state.tiles):
        for c, v in enumerate(row):
            if v != 0 and divmod(v - 1, n) != (r, c):
                count += 1
    return count


def manhattan(state: PuzzleState) -> int:
    n = state.n
    total = 0
    for r, row in enumerate(state.tiles):
        for c, v in enumerate(row):
            if v != 0:
                gr, gc = divmod(v - 1, n)
                total += abs(r - gr) + abs(c - gc)
    return total


def _line_removals(entries: list[tuple[int, int]]) -> int:
    """Minimum tiles to pull out of one line so no reversed pair remains.

    entries holds (tile, goal_index_in_line) in line order. Two tiles
    conflict when the later one has the smaller goal index. Removal is
    greedy on the most-conflicted tile, ties to the lowest tile number.
    """
    conflicts: dict[int, set[int]] = {tile: set() for tile, _ in entries}
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            ti, gi = entries[i]
            tj, gj = entries[j]
            if gi > gj:
                conflicts[ti].add(tj)
                conflicts[tj].add(ti)
    removals = 0
    while True:
        tile = max(conflicts, key=lambda t: (len(conflicts[t]), -t), default=None)
        if tile is None or not conflicts[tile]:
            break
        for other in conflicts[tile]:
            conflicts[other].discard(tile)
        conflicts[tile] = set()
        removals += 1
    return removals


def linear_conflict(state: PuzzleState) -> int:
    """Manhattan distance plus 2 per unavoidable same-line reversal."""
    n = state.n
    removals = 0
    for r in range(n):
        entries = []
        for c in range(n):
            v = state.tiles[r][c]
            if v != 0:
                gr, gc = divmod(v - 1, n)
                if gr == r:
                    entries.append((v, gc))
        removals += _line_removals(entries)
    for c in range(n):
        entries = []
        for r in range(n):
            v = state.tiles[r][c]
            if v != 0:
                gr, gc = divmod(v - 1, n)
                if gc == c:
                    entries.append((v, gr))
        removals += _line_removals(entries)
    return manhattan(state) + 2 * removals


class PuzzleDomain:
    """Adapter binding the puzzle functions to the search engine."""

    def is_goal(self, state: PuzzleState) -> bool:
        return is_goal(state)

    def neighbors(self, state: PuzzleState) -> list[tuple[str, PuzzleState]]:
        return neighbors(state)

    def serialize(self, state: PuzzleState) -> Grid:
        return state.tiles

    def is_valid(self, state: PuzzleState) -> bool:
        return is_valid(state)
