"""Evaluation accounting and the result records shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .tsplib import TspInstance, tour_length

__all__ = [
    "BudgetExhausted",
    "EvaluationBudget",
    "Objective",
    "TracePoint",
    "Tracer",
    "RunResult",
]


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested with no budget left.

    This is the normal stop signal of a run, not an error.
    """


class EvaluationBudget:
    """Monotone counter of objective evaluations with a hard limit."""

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError(f"budget must be positive, got {limit}")
        self.limit = int(limit)
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    def consume(self, n: int = 1) -> None:
        if self.used + n > self.limit:
            raise BudgetExhausted(f"{self.used} + {n} > {self.limit}")
        self.used += n

    def __repr__(self) -> str:
        return f"EvaluationBudget(used={self.used}, limit={self.limit})"


class Objective:
    """Tour-length oracle of one task, charging a shared budget per evaluation."""

    def __init__(self, instance: TspInstance, budget: EvaluationBudget):
        self.instance = instance
        self.budget = budget
        self.dimension = instance.dimension

    def __call__(self, tour: np.ndarray) -> int:
        return tour_length(self.instance, tour, counter=self.budget)

    def two_opt_lengths(self, tour: np.ndarray, length: int,
                        i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """Lengths of the tours obtained by reversing ``tour[i..j]`` (inclusive).

        Each neighbour is charged as one evaluation; the value is obtained
        from the edge delta instead of a full pass over the tour.
        """
        n = len(i)
        self.budget.consume(n)
        m = self.instance.matrix
        if m is None:
            return np.array([tour_length(self.instance, _reverse(tour, a, b))
                             for a, b in zip(i, j)], dtype=np.int64)
        size = tour.shape[0]
        prev = tour[i - 1]
        nxt = tour[(j + 1) % size]
        ti, tj = tour[i], tour[j]
        delta = m[prev, tj] + m[ti, nxt] - m[prev, ti] - m[tj, nxt]
        # reversing the whole array yields the same cycle
        delta[(i == 0) & (j == size - 1)] = 0
        return length + delta


def _reverse(tour: np.ndarray, a: int, b: int) -> np.ndarray:
    out = tour.copy()
    out[a:b + 1] = out[a:b + 1][::-1]
    return out


class TracePoint(NamedTuple):
    evaluations_used: int
    task: int
    best_fitness: int


@dataclass
class RunResult:
    """Outcome of one solver run: best tour and length per task, plus trace."""

    instance_names: list[str]
    best_tours: list[np.ndarray]
    best_fitness: list[int]
    evaluations_used: int
    trace: list[TracePoint] = field(default_factory=list)


class Tracer:
    """Collects per-task best fitness each time ``every`` more evaluations are spent."""

    def __init__(self, every: int):
        self.every = max(1, int(every))
        self.points: list[TracePoint] = []
        self._next = 0

    def checkpoint(self, used: int, bests, force: bool = False) -> None:
        if used < self._next and not force:
            return
        if force and self.points and self.points[-1].evaluations_used == used:
            return
        self.points.extend(TracePoint(used, k, int(b)) for k, b in enumerate(bests))
        self._next = (used // self.every + 1) * self.every
