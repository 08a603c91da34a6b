"""Built-in heuristics expressed as standalone score_state source text.

These mirror the native implementations line for line in behavior, so the
same logic can run through every evaluation backend and be compared
node-for-node against the native engine. They obey the constraints imposed
on generated code: one function, no imports, no while loops, no randomness.
"""

from __future__ import annotations

UPMP_BLOCKING_COUNT = '''\
def score_state(state):
    total = 0
    for lane in state:
        deeper_min = None
        for i in range(len(lane) - 1, -1, -1):
            v = lane[i]
            if v == 0:
                continue
            if deeper_min is not None and deeper_min < v:
                total += 1
            if deeper_min is None or v < deeper_min:
                deeper_min = v
    return total
'''

SPP_MISPLACED = '''\
def score_state(state):
    n = len(state)
    count = 0
    for r in range(n):
        for c in range(n):
            v = state[r][c]
            if v != 0 and ((v - 1) // n != r or (v - 1) % n != c):
                count += 1
    return count
'''

SPP_MANHATTAN = '''\
def score_state(state):
    n = len(state)
    total = 0
    for r in range(n):
        for c in range(n):
            v = state[r][c]
            if v != 0:
                total += abs(r - (v - 1) // n) + abs(c - (v - 1) % n)
    return total
'''

SPP_LINEAR_CONFLICT = '''\
def score_state(state):
    n = len(state)
    total = 0
    for r in range(n):
        for c in range(n):
            v = state[r][c]
            if v != 0:
                total += abs(r - (v - 1) // n) + abs(c - (v - 1) % n)
    removals = 0
    for axis in range(2):
        for line in range(n):
            entries = []
            for pos in range(n):
                v = state[line][pos] if axis == 0 else state[pos][line]
                if v != 0:
                    goal_line = (v - 1) // n if axis == 0 else (v - 1) % n
                    goal_pos = (v - 1) % n if axis == 0 else (v - 1) // n
                    if goal_line == line:
                        entries.append((v, goal_pos))
            conflicts = {tile: set() for tile, _ in entries}
            for i in range(len(entries)):
                for j in range(i + 1, len(entries)):
                    ti, gi = entries[i]
                    tj, gj = entries[j]
                    if gi > gj:
                        conflicts[ti].add(tj)
                        conflicts[tj].add(ti)
            for _ in range(len(entries)):
                best_tile = None
                best_count = 0
                for tile in sorted(conflicts):
                    if len(conflicts[tile]) > best_count:
                        best_count = len(conflicts[tile])
                        best_tile = tile
                if best_tile is None:
                    break
                for other in conflicts[best_tile]:
                    conflicts[other].discard(best_tile)
                conflicts[best_tile] = set()
                removals += 1
    return total + 2 * removals
'''

REFERENCE_SOURCES: dict[str, dict[str, str]] = {
    "spp": {
        "misplaced": SPP_MISPLACED,
        "manhattan": SPP_MANHATTAN,
        "linear_conflict": SPP_LINEAR_CONFLICT,
    },
    "upmp": {
        "blocking_count": UPMP_BLOCKING_COUNT,
    },
}
