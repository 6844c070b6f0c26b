"""Permutation genotype and the dimension-adaptation rules between task spaces.

A permutation is a 1-D integer numpy array holding each of ``1..D`` exactly
once. The same representation serves as task-space tour and as unified-space
individual (dimension ``D_max``).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "is_permutation",
    "check_permutation",
    "project",
    "inflate",
    "random_permutation",
    "format_permutation",
    "parse_permutation",
]


def is_permutation(p) -> bool:
    p = np.asarray(p)
    if p.ndim != 1 or p.size == 0 or not np.issubdtype(p.dtype, np.integer):
        return False
    seen = np.zeros(p.size + 1, dtype=bool)
    if p.min() < 1 or p.max() > p.size:
        return False
    seen[p] = True
    return bool(seen[1:].all())


def check_permutation(p) -> np.ndarray:
    arr = np.asarray(p)
    if not is_permutation(arr):
        raise ValueError(f"not a permutation of 1..{arr.size}: {arr!r}")
    return arr


def project(p: np.ndarray, target_dim: int) -> np.ndarray:
    """Keep only the values ``1..target_dim`` of ``p``, in their original order.

    >>> project(np.array([5, 2, 7, 1, 4, 3, 6]), 4)
    array([2, 1, 4, 3])
    """
    p = np.asarray(p)
    if not 1 <= target_dim <= p.size:
        raise ValueError(f"target_dim {target_dim} outside 1..{p.size}")
    if target_dim == p.size:
        return p.copy()
    return p[p <= target_dim]


def inflate(p: np.ndarray, replaced: np.ndarray) -> np.ndarray:
    """Grow ``p`` to the dimension of ``replaced``.

    Values larger than ``len(p)`` keep the absolute positions they have in
    ``replaced``; the free slots receive the values of ``p`` in order.

    >>> inflate(np.array([2, 1, 4, 3]), np.array([6, 3, 1, 5, 2, 4]))
    array([6, 2, 1, 5, 4, 3])
    """
    p = np.asarray(p)
    replaced = np.asarray(replaced)
    if p.size > replaced.size:
        raise ValueError(
            f"cannot inflate a {p.size}-permutation into dimension {replaced.size}")
    out = replaced.copy()
    out[replaced <= p.size] = p
    return out


def random_permutation(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return rng.permutation(dim) + 1


def format_permutation(p) -> str:
    return ",".join(str(int(v)) for v in p)


def parse_permutation(text: str) -> np.ndarray:
    return check_permutation(np.array([int(v) for v in text.split(",")], dtype=np.int64))
