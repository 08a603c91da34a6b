import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoastar import spp
from oracles import spp_bfs_optimum


def grid(rows):
    return spp.from_rows(rows)


class TestGoal:
    def test_goal_3x3(self):
        assert spp.is_goal(grid([[1, 2, 3], [4, 5, 6], [7, 8, 0]]))

    def test_one_swap_off(self):
        assert not spp.is_goal(grid([[1, 2, 3], [4, 5, 6], [7, 0, 8]]))

    def test_goal_2x2(self):
        assert spp.is_goal(grid([[1, 2], [3, 0]]))


class TestNeighbors:
    def test_corner_blank_has_two(self):
        state = grid([[0, 2, 3], [4, 5, 6], [7, 8, 1]])
        assert len(spp.neighbors(state)) == 2

    def test_center_blank_has_four(self):
        state = grid([[1, 2, 3], [4, 0, 6], [7, 8, 5]])
        assert len(spp.neighbors(state)) == 4

    def test_each_successor_differs_in_two_cells(self):
        state = grid([[1, 2, 3], [4, 0, 6], [7, 8, 5]])
        flat = [v for row in state.tiles for v in row]
        for _, nxt in spp.neighbors(state):
            nxt_flat = [v for row in nxt.tiles for v in row]
            assert sum(a != b for a, b in zip(flat, nxt_flat)) == 2

    def test_move_involution(self):
        state = spp.generate(3, 9, seed=11)
        for move, nxt in spp.neighbors(state):
            assert spp.apply_move(nxt, spp.INVERSE_MOVE[move]) == state


class TestGenerate:
    def test_zero_shuffles_rejected(self):
        with pytest.raises(ValueError):
            spp.generate(3, 0, seed=0)

    def test_deterministic(self):
        assert spp.generate(3, 25, seed=4) == spp.generate(3, 25, seed=4)
        assert spp.generate(4, 50, seed=4) == spp.generate(4, 50, seed=4)

    def test_never_returns_goal(self):
        for seed in range(50):
            assert not spp.is_goal(spp.generate(3, 1, seed=seed))
            assert not spp.is_goal(spp.generate(3, 12, seed=seed))

    def test_optimum_within_shuffle_budget(self):
        for seed in range(10):
            state = spp.generate(3, 6, seed=seed)
            optimum = spp_bfs_optimum(state)
            assert optimum is not None and optimum <= 6

    def test_parity_preserved(self):
        # permutation parity (with the blank as highest element) must match
        # the blank's taxicab-distance parity from its goal corner
        for seed in range(25):
            state = spp.generate(3, 30, seed=seed)
            n = state.n
            flat = [v if v != 0 else n * n for row in state.tiles for v in row]
            inversions = sum(
                1
                for i in range(len(flat))
                for j in range(i + 1, len(flat))
                if flat[i] > flat[j]
            )
            r, c = spp.find_blank(state)
            blank_dist = abs(r - (n - 1)) + abs(c - (n - 1))
            assert inversions % 2 == blank_dist % 2


class TestHeuristics:
    def test_misplaced_goal_zero(self):
        assert spp.misplaced_tiles(spp.goal_state(3)) == 0

    def test_misplaced_single_off(self):
        assert spp.misplaced_tiles(grid([[1, 2, 3], [4, 5, 6], [7, 0, 8]])) == 1

    def test_misplaced_three_off(self):
        # a three-moves-from-goal layout leaves exactly three tiles misplaced
        state = spp.goal_state(3)
        for move in ("L", "U", "U"):
            state = spp.apply_move(state, move)
        assert spp.misplaced_tiles(state) == 3

    def test_manhattan_goal_zero(self):
        assert spp.manhattan(spp.goal_state(3)) == 0

    def test_manhattan_single_tile(self):
        assert spp.manhattan(grid([[1, 2, 3], [4, 5, 6], [7, 0, 8]])) == 1

    def test_manhattan_dominates_misplaced(self):
        for seed in range(1000):
            state = spp.generate(3, 1 + seed % 40, seed=seed)
            assert spp.manhattan(state) >= spp.misplaced_tiles(state)

    def test_linear_conflict_goal_zero(self):
        assert spp.linear_conflict(spp.goal_state(3)) == 0

    def test_linear_conflict_row_reversal(self):
        # independently hand-counted: Manhattan 2 plus one row conflict
        assert spp.linear_conflict(grid([[2, 1, 3], [4, 5, 6], [7, 8, 0]])) == 4

    def test_linear_conflict_dominates_manhattan(self):
        for seed in range(300):
            state = spp.generate(3, 1 + seed % 40, seed=seed)
            assert spp.linear_conflict(state) >= spp.manhattan(state)

    def test_linear_conflict_triple_reversal_uses_minimal_removals(self):
        # row 3 2 1: every pair reversed; removing the middle tile resolves
        # two conflicts, one more removal clears the rest -> 2 removals
        state = grid([[3, 2, 1], [4, 5, 6], [7, 8, 0]])
        assert spp.linear_conflict(state) == spp.manhattan(state) + 2 * 2

    def test_admissible_against_bfs(self, spp3_distances):
        for seed in range(50):
            state = spp.generate(3, 1 + seed % 20, seed=seed)
            optimum = spp3_distances[state.tiles]
            assert spp.linear_conflict(state) <= optimum


class TestValidation:
    def test_from_rows_rejects_duplicates(self):
        with pytest.raises(ValueError):
            grid([[1, 1, 3], [4, 5, 6], [7, 8, 0]])

    def test_from_rows_rejects_missing_blank(self):
        with pytest.raises(ValueError):
            grid([[1, 2, 3], [4, 5, 6], [7, 8, 9]])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32), shuffles=st.integers(min_value=1, max_value=60))
def test_generated_states_are_valid_permutations(seed, shuffles):
    state = spp.generate(3, shuffles, seed=seed)
    assert spp.is_valid(state)
    assert not spp.is_goal(state)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32))
def test_walk_without_inversion_ban_still_valid(seed):
    state = spp.generate(3, 10, seed=seed, allow_inverse=True)
    assert spp.is_valid(state)
    assert not spp.is_goal(state)


def test_admissibility_chain_exhaustive_2x2():
    # every reachable 2x2 state: misplaced <= manhattan <= lc <= optimum
    from oracles import spp_distance_table

    table = spp_distance_table(2)
    assert len(table) == 12  # half of 4! permutations are reachable
    for tiles, optimum in table.items():
        state = spp.PuzzleState(2, tiles)
        m = spp.misplaced_tiles(state)
        man = spp.manhattan(state)
        lc = spp.linear_conflict(state)
        assert m <= man <= lc <= optimum
