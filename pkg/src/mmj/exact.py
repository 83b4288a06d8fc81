"""Exact all-pairs min-max-jump (minimax path / bottleneck) distance.

The min-max-jump distance between two points, under the *context* of a point
set, is the minimum over all loop-free paths between them of the largest
single hop on the path.  Three exact routes live here:

* :func:`mmj_brute_force` enumerates simple paths and is the oracle the other
  engines are tested against;
* :func:`mmj_by_recursion` grows the context one point at a time in O(n^3),
  using :func:`extend_row` (distances from the new point) and
  :func:`update_pairs` (existing pairs can only improve through the new
  point);
* :func:`query_external_point` answers a single-row query for a point outside
  the context without touching the stored matrix.

:func:`mmj_by_recursion_directed` is the asymmetric variant: forward and
backward rows are computed separately and pair updates combine one of each.
Every produced value is one of the input entries (min/max select, they never
mix values), so results from different engines can be compared with exact
floating-point equality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mmj.base_metrics import BaseDistanceMatrix

DEFAULT_BRUTE_FORCE_CAP = 10


@dataclass(frozen=True)
class MmjMatrix:
    """All-pairs min-max-jump distances under the context of all n points."""

    values: np.ndarray
    directed: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"matrix must be square, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def context_size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class MmjRow:
    """Distances from one source point to every point of an extended context.

    ``values`` covers the extended context (old points first, the source
    last), so ``values[source_index] == 0`` and ``len(values)`` equals the
    extended context size.
    """

    source_index: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)


def path_max_jump(base: BaseDistanceMatrix, path) -> float:
    """Largest single hop along an explicit path of point indices."""
    idx = np.asarray(path, dtype=int)
    if idx.ndim != 1 or idx.size < 1:
        raise ValueError("path must contain at least one point index")
    if np.any(idx < 0) or np.any(idx >= base.n):
        raise ValueError("path index out of range")
    if idx.size == 1:
        return 0.0
    return float(base.values[idx[:-1], idx[1:]].max())


def _minimax_dfs(vals: list[list[float]], n: int, src: int, dst: int) -> float:
    # Depth-first enumeration of simple paths with branch-and-bound pruning:
    # a prefix whose running max already ties the best cannot improve it.
    best = math.inf
    visited = [False] * n
    visited[src] = True

    def walk(u: int, cur: float) -> None:
        nonlocal best
        row = vals[u]
        for v in range(n):
            if visited[v]:
                continue
            m = cur if cur >= row[v] else row[v]
            if m >= best:
                continue
            if v == dst:
                best = m
            else:
                visited[v] = True
                walk(v, m)
                visited[v] = False

    walk(src, 0.0)
    return best


def mmj_brute_force(base: BaseDistanceMatrix, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> MmjMatrix:
    """Oracle engine: exhaustive minimum over all simple paths, per pair.

    Refuses contexts larger than ``cap`` points (combinatorial blow-up
    guard).  Handles directed and undirected inputs alike.
    """
    n = base.n
    if n > cap:
        raise ValueError(f"brute force capped at {cap} points, got {n}")
    vals = base.values.tolist()
    out = np.zeros((n, n))
    for i in range(n):
        start_j = 0 if base.directed else i + 1
        for j in range(start_j, n):
            if i == j:
                continue
            d = _minimax_dfs(vals, n, i, j)
            out[i, j] = d
            if not base.directed:
                out[j, i] = d
    return MmjMatrix(out, directed=base.directed)


def _row_from_new_point(sub: np.ndarray, d_new: np.ndarray) -> np.ndarray:
    # Distances new -> r over the extended context: the first hop goes to
    # some old point t, the rest is the old in-context distance t -> r.
    return np.minimum.reduce(np.maximum(d_new[:, None], sub), axis=0)


def _check_base_vector(vec, n: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (n,):
        raise ValueError(f"base-distance vector must have length {n}, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)) or np.any(vec < 0):
        raise ValueError("base-distance vector entries must be finite and non-negative")
    return vec


def extend_row(current: MmjMatrix, new_point_base) -> MmjRow:
    """Distances from a new point to an n-point context, under context n+1.

    ``new_point_base[t]`` is the base distance from the new point to context
    point t.  Entry r of the result is ``min over t of max(new_point_base[t],
    current[t, r])``; the trailing slot is the source itself (0).
    """
    if current.directed:
        raise ValueError("extend_row applies to undirected contexts")
    n = current.context_size
    vec = _check_base_vector(new_point_base, n)
    row = _row_from_new_point(current.values, vec)
    return MmjRow(source_index=n, values=np.append(row, 0.0))


def update_pairs(current: MmjMatrix, new_row: MmjRow) -> MmjMatrix:
    """Fold a new point's row into an n-point matrix, giving the n+1 matrix.

    Each existing pair (i, j) either keeps its old value or improves by
    routing through the new point: ``min(old, max(row[i], row[j]))``.  The
    update reads only the frozen new row, so any pair order gives the same
    result.
    """
    if current.directed:
        raise ValueError("update_pairs applies to undirected contexts")
    n = current.context_size
    if new_row.source_index != n or new_row.values.shape != (n + 1,):
        raise ValueError(f"new row does not extend a context of size {n}")
    row = new_row.values[:n]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = np.minimum(current.values, np.maximum(row[:, None], row[None, :]))
    out[n, :n] = row
    out[:n, n] = row
    return MmjMatrix(out, directed=False)


def mmj_by_recursion(base: BaseDistanceMatrix) -> MmjMatrix:
    """O(n^3) exact engine: grow the context one point at a time.

    Seeds the 2-point case with the single direct distance, then alternates
    the new-point row and the pair updates for each added point.  Equals
    :func:`mmj_brute_force` entrywise wherever the oracle is feasible.
    """
    if base.directed:
        raise ValueError("mmj_by_recursion applies to undirected inputs; see mmj_by_recursion_directed")
    n = base.n
    out = np.zeros((n, n))
    if n >= 2:
        out[0, 1] = out[1, 0] = base.values[0, 1]
    # Row-chunked steps keep the scratch block cache-resident, which matters
    # once the growing submatrix outruns the last-level cache.
    chunk = 64
    scratch = np.empty((chunk, n)) if n > 2 else None
    row = np.empty(n) if n > 2 else None
    for m in range(2, n):
        sub = out[:m, :m]
        d = base.values[m, :m]
        for r0 in range(0, m, chunk):
            r1 = min(r0 + chunk, m)
            buf = scratch[: r1 - r0, :m]
            # sub is symmetric, so the reduction over intermediates can run
            # along contiguous rows: row[r] = min over t of max(d[t], sub[r, t]).
            np.maximum(sub[r0:r1], d[None, :], out=buf)
            buf.min(axis=1, out=row[r0:r1])
        for r0 in range(0, m, chunk):
            r1 = min(r0 + chunk, m)
            buf = scratch[: r1 - r0, :m]
            np.maximum(row[r0:r1, None], row[None, :m], out=buf)
            np.minimum(sub[r0:r1], buf, out=sub[r0:r1])
        out[m, :m] = row[:m]
        out[:m, m] = row[:m]
    return MmjMatrix(out, directed=False)


def mmj_by_recursion_directed(base: BaseDistanceMatrix) -> MmjMatrix:
    """Directed counterpart of :func:`mmj_by_recursion`.

    For each added point the forward row (new -> r: first hop out of the new
    point) and the backward row (r -> new: last hop into the new point) are
    computed from the previous matrix, then every ordered pair (i, j) is
    updated with ``min(old, max(backward[i], forward[j]))``.  The result is
    generally asymmetric.
    """
    n = base.n
    out = np.zeros((n, n))
    if n >= 2:
        out[0, 1] = base.values[0, 1]
        out[1, 0] = base.values[1, 0]
    scratch = np.empty((n, n)) if n > 2 else None
    for m in range(2, n):
        sub = out[:m, :m]
        buf = scratch[:m, :m]
        np.maximum(base.values[m, :m, None], sub, out=buf)
        fwd = buf.min(axis=0)
        np.maximum(sub, base.values[:m, m][None, :], out=buf)
        bwd = buf.min(axis=1)
        np.maximum(bwd[:, None], fwd[None, :], out=buf)
        np.minimum(sub, buf, out=sub)
        out[m, :m] = fwd
        out[:m, m] = bwd
    return MmjMatrix(out, directed=True)


def query_external_point(context_mmj: MmjMatrix, base_to_context) -> MmjRow:
    """Distances from an outside point p to every context point, under
    context-plus-p, without mutating the context matrix.

    ``base_to_context[t]`` is the base distance d(p, context point t).  The
    returned row lists the N context points first and p itself (0) last.
    """
    if context_mmj.directed:
        raise ValueError("external-point queries apply to undirected contexts")
    n = context_mmj.context_size
    vec = _check_base_vector(base_to_context, n)
    row = _row_from_new_point(context_mmj.values, vec)
    return MmjRow(source_index=n, values=np.append(row, 0.0))
