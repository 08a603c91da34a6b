"""Fitness: mean relative deviation of achieved move counts from
per-instance lower bounds."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class InstanceResult:
    instance_seed: int
    moves: int
    lower_bound: int
    solved: bool
    evaluated_nodes: int
    elapsed_seconds: float


def fitness(per_instance: list[InstanceResult]) -> float:
    """(1/|I|) * sum_i (m_i - lb_i) / lb_i, minimized.

    Unsolved instances must already carry the penalty move count. A lower
    bound of 0 (state already sorted) contributes m_i with denominator 1,
    keeping the sum finite.
    """
    if not per_instance:
        raise ValueError("fitness requires at least one instance result")
    total = 0.0
    for result in per_instance:
        if result.lower_bound < 0:
            raise ValueError("lower bound must be nonnegative")
        denom = result.lower_bound if result.lower_bound > 0 else 1
        total += (result.moves - result.lower_bound) / denom
    return total / len(per_instance)


def solved_only_fitness(per_instance: list[InstanceResult]) -> float | None:
    """Benchmark-table convention: mean deviation over solved instances only;
    None when nothing was solved."""
    solved = [r for r in per_instance if r.solved]
    if not solved:
        return None
    return fitness(solved)
