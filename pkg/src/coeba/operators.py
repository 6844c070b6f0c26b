"""Movement and variation operators on permutations.

Positions passed to the deterministic helpers (:func:`reverse_segment`,
:func:`insertion_move`, ``cuts=``) are 0-based array indices.
"""

from __future__ import annotations

import enum
from typing import Callable

import numpy as np

__all__ = [
    "MoveKind",
    "hamming",
    "reverse_segment",
    "insertion_move",
    "two_opt_step",
    "insertion_step",
    "apply_move",
    "sample_two_opt_cuts",
    "best_sampled_neighbor",
    "two_opt_neighborhood",
    "order_crossover",
]


class MoveKind(enum.Enum):
    TWO_OPT = "2-opt"
    INSERTION = "insertion"


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    """Number of positions at which the two permutations differ."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return int(np.count_nonzero(a != b))


def reverse_segment(p: np.ndarray, i: int, j: int) -> np.ndarray:
    """Copy of ``p`` with ``p[i..j]`` (inclusive) reversed."""
    out = np.array(p, copy=True)
    out[i:j + 1] = out[i:j + 1][::-1]
    return out


def insertion_move(p: np.ndarray, src: int, dst: int) -> np.ndarray:
    """Remove the element at ``src`` and reinsert it so it ends at index ``dst``."""
    out = np.array(p, copy=True)
    v = out[src]
    if src < dst:
        out[src:dst] = out[src + 1:dst + 1]
    elif dst < src:
        out[dst + 1:src + 1] = out[dst:src]
    out[dst] = v
    return out


def _distinct_pair(n: int, rng: np.random.Generator, size=None):
    a = rng.integers(0, n, size=size)
    b = rng.integers(0, n - 1, size=size)
    b = b + (b >= a)
    return a, b


def sample_two_opt_cuts(n: int, rng: np.random.Generator, size: int):
    """``size`` uniform segments ``(i, j)`` with ``0 <= i < j < n``."""
    a, b = _distinct_pair(n, rng, size)
    return np.minimum(a, b), np.maximum(a, b)


def two_opt_step(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Reverse one uniformly chosen segment of length >= 2."""
    p = np.asarray(p)
    if p.size < 2:
        raise ValueError("2-opt needs at least two elements")
    i, j = sample_two_opt_cuts(p.size, rng, 1)
    return reverse_segment(p, int(i[0]), int(j[0]))


def insertion_step(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Move one uniformly chosen element to a different uniformly chosen index."""
    p = np.asarray(p)
    if p.size < 2:
        raise ValueError("insertion needs at least two elements")
    src, dst = _distinct_pair(p.size, rng)
    return insertion_move(p, int(src), int(dst))


def apply_move(p: np.ndarray, kind: MoveKind, v: int,
               rng: np.random.Generator) -> np.ndarray:
    """Apply ``v`` elementary steps of ``kind`` one after the other."""
    if v < 1:
        raise ValueError(f"velocity must be >= 1, got {v}")
    out = np.array(p, copy=True)
    n = out.size
    if kind is MoveKind.TWO_OPT:
        for _ in range(v):
            i, j = sample_two_opt_cuts(n, rng, 1)
            i, j = int(i[0]), int(j[0])
            out[i:j + 1] = out[i:j + 1][::-1]
    else:
        for _ in range(v):
            src, dst = _distinct_pair(n, rng)
            out = insertion_move(out, int(src), int(dst))
    return out


def best_sampled_neighbor(p: np.ndarray, n_samples: int,
                          objective: Callable[[np.ndarray], float],
                          rng: np.random.Generator,
                          fitness: float | None = None):
    """Best of ``n_samples`` random 2-opt neighbours of ``p``.

    Returns ``(tour, length)``. Ties go to the first neighbour drawn. The
    winner may well be worse than ``p`` itself, which is not a candidate.
    Asking for at least ``n(n-1)/2`` samples enumerates every segment
    reversal once instead of sampling. When ``fitness`` (the length of ``p``) is known and the objective offers
    ``two_opt_lengths``, neighbours are scored from edge deltas.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    p = np.asarray(p)
    n = p.size
    if n_samples >= n * (n - 1) // 2:
        i, j = np.triu_indices(n, k=1)
    else:
        i, j = sample_two_opt_cuts(n, rng, n_samples)
    fast = getattr(objective, "two_opt_lengths", None)
    if fast is not None and fitness is not None:
        lengths = fast(p, fitness, i, j)
    else:
        lengths = np.array([objective(reverse_segment(p, a, b))
                            for a, b in zip(i, j)])
    best = int(np.argmin(lengths))
    return reverse_segment(p, int(i[best]), int(j[best])), lengths[best].item()


def two_opt_neighborhood(p: np.ndarray):
    """Every segment reversal of ``p`` (all ``i < j``), for brute-force checks."""
    p = np.asarray(p)
    for i in range(p.size - 1):
        for j in range(i + 1, p.size):
            yield reverse_segment(p, i, j)


def _ox_child(seg_parent: np.ndarray, fill_parent: np.ndarray,
              c1: int, c2: int) -> np.ndarray:
    n = seg_parent.size
    child = np.empty_like(seg_parent)
    child[c1:c2] = seg_parent[c1:c2]
    in_segment = np.zeros(n + 1, dtype=bool)
    in_segment[seg_parent[c1:c2]] = True
    start = c2 % n
    order = np.concatenate((fill_parent[start:], fill_parent[:start]))
    fill = order[~in_segment[order]]
    child[:c1] = fill[:c1]
    child[c2:] = fill[c1:]
    return child


def order_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                    cuts: tuple[int, int] | None = None):
    """Order crossover (OX).

    Child 1 keeps ``a[c1:c2]`` in place; the remaining slots, left to right,
    take the missing values in the cyclic order of ``b`` starting at index
    ``c2``. Child 2 swaps the roles of the parents. ``cuts`` fixes
    ``0 <= c1 < c2 <= n``; otherwise both are drawn uniformly.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    n = a.size
    if n < 2:
        raise ValueError("order crossover needs at least two elements")
    if cuts is None:
        c1, c2 = _distinct_pair(n + 1, rng)
        c1, c2 = int(min(c1, c2)), int(max(c1, c2))
    else:
        c1, c2 = cuts
        if not 0 <= c1 < c2 <= n:
            raise ValueError(f"invalid cuts {cuts} for dimension {n}")
    return _ox_child(a, b, c1, c2), _ox_child(b, a, c1, c2)
