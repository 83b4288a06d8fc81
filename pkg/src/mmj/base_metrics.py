"""Point sets, base distance functions, and pairwise base-distance matrices.

Everything downstream (the min-max-jump engines, clustering, evaluation,
prediction) consumes a :class:`BaseDistanceMatrix`, built either from point
coordinates with one of the supported metrics or supplied by the caller as a
precomputed matrix.  Indices are 0-based everywhere, in code and in all file
formats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRIC_KINDS = ("euclidean", "manhattan", "chebyshev", "minkowski", "precomputed")


@dataclass(frozen=True)
class BaseMetric:
    """A base distance function d(i, j).

    ``minkowski`` carries its exponent ``p`` (finite, > 0); the other kinds
    take no parameter.  ``precomputed`` is a marker only: the caller supplies
    the full matrix and no coordinate arithmetic is performed.
    """

    kind: str = "euclidean"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}; expected one of {METRIC_KINDS}")
        if self.kind == "minkowski":
            if self.p is None or not np.isfinite(self.p) or self.p <= 0:
                raise ValueError("minkowski metric requires a finite exponent p > 0")
        elif self.p is not None:
            raise ValueError(f"metric {self.kind!r} takes no exponent")


EUCLIDEAN = BaseMetric("euclidean")
MANHATTAN = BaseMetric("manhattan")
CHEBYSHEV = BaseMetric("chebyshev")
PRECOMPUTED = BaseMetric("precomputed")


@dataclass(frozen=True)
class PointSet:
    """N points in D-dimensional real space, as an (N, D) float array.

    Coordinates must be finite; duplicate points are allowed (their base
    distance is simply 0).
    """

    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2:
            raise ValueError(f"coords must be a 2-D (N, D) array, got shape {coords.shape}")
        if coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValueError("need at least one point and one dimension")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class BaseDistanceMatrix:
    """N x N matrix of pairwise base distances.

    Invariants enforced at construction: zero diagonal, finite non-negative
    entries, and symmetry unless ``directed``.  Precomputed matrices with
    zeros between distinct indices are accepted (graph inputs need arbitrary
    weights) but are flagged via :attr:`positive_off_diagonal`, and metric
    property guarantees no longer apply to them.
    """

    values: np.ndarray
    directed: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("distance matrix entries must be finite")
        if np.any(vals < 0):
            raise ValueError("distance matrix entries must be non-negative")
        if np.any(np.diagonal(vals) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        if not self.directed and not np.array_equal(vals, vals.T):
            raise ValueError("undirected distance matrix must be exactly symmetric")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def positive_off_diagonal(self) -> bool:
        """True when all distances between distinct indices are > 0."""
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all(self.values[off] > 0))


def _reduce_diffs(diffs: np.ndarray, metric: BaseMetric) -> np.ndarray:
    # diffs has shape (..., D); reduces the last axis to a distance.
    if metric.kind == "euclidean":
        return np.sqrt((diffs * diffs).sum(axis=-1))
    if metric.kind == "manhattan":
        return np.abs(diffs).sum(axis=-1)
    if metric.kind == "chebyshev":
        return np.abs(diffs).max(axis=-1)
    if metric.kind == "minkowski":
        return (np.abs(diffs) ** metric.p).sum(axis=-1) ** (1.0 / metric.p)
    raise ValueError(f"metric {metric.kind!r} cannot be evaluated from coordinates")


def base_distance(p, q, metric: BaseMetric = EUCLIDEAN) -> float:
    """Distance between two coordinate vectors under the chosen metric."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim != 1 or q.ndim != 1 or p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise ValueError("coordinates must be finite")
    return float(_reduce_diffs(p - q, metric))


def point_to_set_distances(p, coords: np.ndarray, metric: BaseMetric = EUCLIDEAN) -> np.ndarray:
    """Vector of distances from one point to every row of ``coords``."""
    p = np.asarray(p, dtype=float)
    coords = np.asarray(coords, dtype=float)
    if p.ndim != 1 or coords.ndim != 2 or coords.shape[1] != p.shape[0]:
        raise ValueError(f"dimension mismatch: point {p.shape} vs set {coords.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("coordinates must be finite")
    return _reduce_diffs(coords - p[None, :], metric)


def pairwise_base_matrix(points: PointSet, metric: BaseMetric = EUCLIDEAN) -> BaseDistanceMatrix:
    """All-pairs base distances of a point set.

    The computation is row-parallel in spirit (plain broadcasting here); the
    result does not depend on evaluation order.  Symmetry and the zero
    diagonal are exact by construction.
    """
    if metric.kind == "precomputed":
        raise ValueError("precomputed metric: construct BaseDistanceMatrix from the matrix directly")
    coords = points.coords
    diffs = coords[:, None, :] - coords[None, :, :]
    vals = _reduce_diffs(diffs, metric)
    np.fill_diagonal(vals, 0.0)
    return BaseDistanceMatrix(vals, directed=False)
