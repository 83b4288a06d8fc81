"""Shared fixtures and independent reference oracles.

The reference implementations here enumerate paths via itertools and are
deliberately separate from the package's own search code, so engine tests
compare two unrelated routes to the same quantity.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from mmj import BaseDistanceMatrix

# 4-point worked example: distances chosen so the five a->c path maxima come
# out as 28, 19, 17, 19, 12 and the full matrix is hand-checkable.
F1_BASE = np.array(
    [
        [0.0, 19.0, 28.0, 11.0],
        [19.0, 0.0, 12.0, 10.0],
        [28.0, 12.0, 0.0, 17.0],
        [11.0, 10.0, 17.0, 0.0],
    ]
)

F1_MMJ = np.array(
    [
        [0.0, 11.0, 12.0, 11.0],
        [11.0, 0.0, 12.0, 10.0],
        [12.0, 12.0, 0.0, 12.0],
        [11.0, 10.0, 12.0, 0.0],
    ]
)

A, B, C, D = 0, 1, 2, 3


@pytest.fixture
def f1_base() -> BaseDistanceMatrix:
    return BaseDistanceMatrix(F1_BASE)


# 1-D points {0, 1, 10, 11}: two tight pairs separated by a 9-gap.
GAP_BASE = np.abs(np.subtract.outer([0.0, 1.0, 10.0, 11.0], [0.0, 1.0, 10.0, 11.0]))

GAP_MMJ = np.array(
    [
        [0.0, 1.0, 9.0, 9.0],
        [1.0, 0.0, 9.0, 9.0],
        [9.0, 9.0, 0.0, 1.0],
        [9.0, 9.0, 1.0, 0.0],
    ]
)


@pytest.fixture
def gap_base() -> BaseDistanceMatrix:
    return BaseDistanceMatrix(GAP_BASE)


def reference_minimax(values: np.ndarray, i: int, j: int) -> float:
    """All simple paths by explicit permutation enumeration; min of max hop."""
    n = values.shape[0]
    if i == j:
        return 0.0
    others = [v for v in range(n) if v not in (i, j)]
    best = math.inf
    for r in range(len(others) + 1):
        for mids in itertools.permutations(others, r):
            path = (i, *mids, j)
            m = max(values[a][b] for a, b in zip(path[:-1], path[1:]))
            best = min(best, m)
    return best


def reference_minimax_matrix(values: np.ndarray, directed: bool = False) -> np.ndarray:
    n = values.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and (directed or j > i):
                out[i, j] = reference_minimax(values, i, j)
                if not directed:
                    out[j, i] = out[i, j]
    return out


def reference_widest(cap: np.ndarray, i: int, j: int) -> float:
    """All simple paths by permutation enumeration; max of min capacity."""
    n = cap.shape[0]
    if i == j:
        return math.inf
    others = [v for v in range(n) if v not in (i, j)]
    best = 0.0
    for r in range(len(others) + 1):
        for mids in itertools.permutations(others, r):
            path = (i, *mids, j)
            m = min(cap[a][b] for a, b in zip(path[:-1], path[1:]))
            best = max(best, m)
    return best


def random_symmetric_base(rng: np.random.Generator, n: int, ties: bool = False) -> BaseDistanceMatrix:
    if ties:
        upper = rng.integers(1, 6, size=(n, n)).astype(float) / 10.0
    else:
        upper = rng.uniform(0.01, 1.0, size=(n, n))
    upper = np.triu(upper, k=1)
    return BaseDistanceMatrix(upper + upper.T)


def random_directed_base(rng: np.random.Generator, n: int, ties: bool = False) -> BaseDistanceMatrix:
    if ties:
        vals = rng.integers(1, 6, size=(n, n)).astype(float) / 10.0
    else:
        vals = rng.uniform(0.01, 1.0, size=(n, n))
    np.fill_diagonal(vals, 0.0)
    return BaseDistanceMatrix(vals, directed=True)


def random_points(rng: np.random.Generator, n: int, dim: int = 2) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, dim))
