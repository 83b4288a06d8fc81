"""K-means-style clustering under min-max-jump distance.

Cluster centers are medoid-like: the center of a member set is the member
minimizing the sum of squared distances to all members, and all tied
minimizers are kept as the center set.  Training alternates assignment
(nearest center set, ties broken by a uniform random draw among the tied
clusters) with center recomputation under the full-context matrix, ending
when the collection of center sets repeats.

Border points are points whose nearest center is not unique: *weak* when
tied among fewer than K clusters, *strong* when tied among all K.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

BORDER_NONE = "none"
BORDER_WEAK = "weak"
BORDER_STRONG = "strong"


def _matrix_values(matrix) -> np.ndarray:
    vals = getattr(matrix, "values", matrix)
    return np.asarray(vals, dtype=float)


def _scom_with_cost(vals: np.ndarray, members: Sequence[int]) -> tuple[list[int], float]:
    idx = np.asarray(list(members), dtype=int)
    if idx.size == 0:
        raise ValueError("cannot take the center of an empty member set")
    squares = vals[np.ix_(idx, idx)] ** 2
    # Summing each candidate's squares in sorted order makes the sums (and
    # therefore the tie set) independent of how the points were numbered.
    squares.sort(axis=1)
    sums = squares.sum(axis=1)
    best = sums.min()
    return [int(i) for i in idx[sums == best]], float(best)


def one_scom(mmj, members: Sequence[int]) -> list[int]:
    """All member indices minimizing the summed squared distance to the set.

    The context is whatever matrix the caller passes (full set or a single
    cluster's own matrix).  The returned tie set is sorted and non-empty.
    """
    return _scom_with_cost(_matrix_values(mmj), members)[0]


@dataclass(frozen=True)
class KmeansConfig:
    k: int
    max_iter: int = 100
    n_init: int = 10
    seed: int = 0
    tie_policy: str = "random_allocation"
    center_update: str = "one_scom"  # or "pam_swap"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1 or self.n_init < 1:
            raise ValueError("max_iter and n_init must be >= 1")
        if self.tie_policy != "random_allocation":
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")
        if self.center_update not in ("one_scom", "pam_swap"):
            raise ValueError(f"unknown center update {self.center_update!r}")


@dataclass(frozen=True)
class ClusterAssignment:
    """Result of one clustering run (the best of all restarts)."""

    labels: np.ndarray
    border_status: np.ndarray
    centers: list[list[int]]
    objective: float
    n_iter: int
    objective_trace: list[float] = field(default_factory=list)


def _center_distances(vals: np.ndarray, centers: list[list[int]]) -> np.ndarray:
    # (n, k) distance of every point to every cluster's center set (min over
    # the tied representatives).
    return np.stack([vals[:, c].min(axis=1) for c in centers], axis=1)


def _assign(dist: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    mins = dist.min(axis=1)
    tied = dist == mins[:, None]
    labels = np.argmax(tied, axis=1)
    for p in np.flatnonzero(tied.sum(axis=1) > 1):
        opts = np.flatnonzero(tied[p])
        labels[p] = opts[rng.integers(len(opts))]
    return labels


def _fix_empty_clusters(dist: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    # Documented fallback: re-seed an emptied cluster at the point farthest
    # from its own current center, drawn from clusters that can spare a
    # member.  Each pass fills one empty cluster and never creates another.
    while True:
        counts = np.bincount(labels, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            return labels
        c = int(empties[0])
        eligible = counts[labels] >= 2
        own = dist[np.arange(len(labels)), labels]
        score = np.where(eligible, own, -np.inf)
        labels[int(np.argmax(score))] = c


def _canonical(centers: list[list[int]]) -> frozenset:
    return frozenset(frozenset(c) for c in centers)


def _partition_cost(vals: np.ndarray, labels: np.ndarray, k: int) -> float:
    # Within-cluster cost: per cluster, the minimal summed squared distance
    # of members to a single member.  All tied centers give the same sum, so
    # the cost is independent of which tied representative is picked.
    return sum(_scom_with_cost(vals, np.flatnonzero(labels == c))[1] for c in range(k))


def _lloyd_run(vals: np.ndarray, cfg: KmeansConfig, rng: np.random.Generator):
    n = vals.shape[0]
    centers = [[int(c)] for c in rng.choice(n, size=cfg.k, replace=False)]
    seen = {_canonical(centers)}
    trace: list[float] = []
    iterations = 0
    for _ in range(cfg.max_iter):
        iterations += 1
        dist = _center_distances(vals, centers)
        labels = _fix_empty_clusters(dist, _assign(dist, rng), cfg.k)
        updates = [_scom_with_cost(vals, np.flatnonzero(labels == c)) for c in range(cfg.k)]
        new_centers = [u[0] for u in updates]
        trace.append(sum(u[1] for u in updates))
        repeated = _canonical(new_centers) in seen
        seen.add(_canonical(new_centers))
        centers = new_centers
        if repeated:
            break
    dist = _center_distances(vals, centers)
    labels = _fix_empty_clusters(dist, _assign(dist, rng), cfg.k)
    obj = _partition_cost(vals, labels, cfg.k)
    trace.append(obj)
    return labels, centers, obj, iterations, trace


def _pam_swap_run(vals: np.ndarray, cfg: KmeansConfig, rng: np.random.Generator):
    # Optional PAM-style search: greedy best-improvement medoid swaps on the
    # summed squared distance objective, then one assignment pass.
    n = vals.shape[0]
    medoids = [int(c) for c in rng.choice(n, size=cfg.k, replace=False)]

    def cost(meds: list[int]) -> float:
        d = vals[:, meds].min(axis=1)
        return float((d * d).sum())

    current = cost(medoids)
    iterations = 0
    trace = [current]
    for _ in range(cfg.max_iter):
        iterations += 1
        best_swap, best_cost = None, current
        in_set = set(medoids)
        for mi in range(cfg.k):
            for h in range(n):
                if h in in_set:
                    continue
                cand = medoids.copy()
                cand[mi] = h
                c = cost(cand)
                if c < best_cost:
                    best_swap, best_cost = cand, c
        if best_swap is None:
            break
        medoids, current = best_swap, best_cost
        trace.append(current)
    centers = [[m] for m in medoids]
    dist = _center_distances(vals, centers)
    labels = _fix_empty_clusters(dist, _assign(dist, rng), cfg.k)
    centers = [one_scom(vals, np.flatnonzero(labels == c)) for c in range(cfg.k)]
    dist = _center_distances(vals, centers)
    labels = _fix_empty_clusters(dist, _assign(dist, rng), cfg.k)
    obj = _partition_cost(vals, labels, cfg.k)
    trace.append(obj)
    return labels, centers, obj, iterations, trace


def mmj_kmeans(mmj, cfg: KmeansConfig) -> ClusterAssignment:
    """Cluster the context points of a full min-max-jump matrix.

    Runs ``cfg.n_init`` restarts from random center draws (seeded per restart
    from ``cfg.seed``) and keeps the run with the lowest summed squared
    distance of points to their nearest center set.
    """
    vals = _matrix_values(mmj)
    n = vals.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of points {n}")
    run = _pam_swap_run if cfg.center_update == "pam_swap" else _lloyd_run
    best = None
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.n_init):
        result = run(vals, cfg, np.random.default_rng(child))
        if best is None or result[2] < best[2]:
            best = result
    labels, centers, obj, iterations, trace = best
    return ClusterAssignment(
        labels=labels,
        border_status=classify_border_points(mmj, centers),
        centers=centers,
        objective=obj,
        n_iter=iterations,
        objective_trace=trace,
    )


def classify_border_points(mmj, centers: list[list[int]]) -> np.ndarray:
    """Border status per point against the given center sets.

    A point counting c distinct clusters at its minimum center distance is
    ``none`` for c == 1, ``strong`` for c == K, otherwise ``weak``.
    Distances to a multi-center cluster take the minimum over its tied
    representatives; ties are exact floating-point equality.
    """
    vals = _matrix_values(mmj)
    dist = _center_distances(vals, centers)
    counts = (dist == dist.min(axis=1)[:, None]).sum(axis=1)
    k = len(centers)
    status = np.full(vals.shape[0], BORDER_NONE, dtype=object)
    status[(counts > 1) & (counts < k)] = BORDER_WEAK
    if k > 1:
        status[counts == k] = BORDER_STRONG
    return status
