"""Monte-Carlo upper-bound estimation of min-max-jump distances.

A sampled path's maximum jump is always achievable, so the minimum over any
number of sampled paths is an upper bound on the exact distance, reaching it
as soon as one sampled path is optimal.  Paths are drawn by a stochastic
greedy walk: at each step the walker picks uniformly among the k nearest
unvisited points, except that it moves straight to the target when the target
is the single nearest remaining point.

Estimated values can be propagated: if a pair's estimate is delta, any pair
whose endpoints sit strictly within base distance delta of the original
endpoints is an equally valid upper bound and receives delta as well,
breadth-first and recursively.  Conflicting writes to a cell keep the
minimum, which is the tightest sound combination of upper bounds.

Randomness is fully determined by the configured seed: each pair ``(i, j)``
owns an independent stream keyed by ``(i, j)``, and path ``p`` consumes a
fixed slice of that stream.  Estimates for a prefix of the paths therefore
never depend on how many more paths are sampled, and pair estimations can
run in any order or in parallel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mmj.base_metrics import BaseDistanceMatrix
from mmj.exact import MmjMatrix


@dataclass(frozen=True)
class SamplerConfig:
    k_neighbors: int = 3
    num_paths: int = 100
    seed: int = 0
    copy_enabled: bool = True

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")


def _pair_uniforms(seed: int, i: int, j: int, paths: int, cols: int) -> np.ndarray:
    # Row p is the uniform stream of path p for this pair.  The generator
    # fills row-major, so row p occupies stream positions [p*cols, (p+1)*cols)
    # no matter how many paths are requested: sampling more paths never
    # changes the earlier ones.
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(i), int(j)))
    return np.random.default_rng(ss).random((paths, cols))


def _check_index(idx: int, n: int, name: str) -> int:
    idx = int(idx)
    if not 0 <= idx < n:
        raise ValueError(f"{name} index {idx} out of range for {n} points")
    return idx


def sample_path_max_jump(
    base: BaseDistanceMatrix,
    start: int,
    end: int,
    cfg: SamplerConfig,
    rng: np.random.Generator,
) -> float:
    """Maximum jump of one stochastic-greedy path from start to end.

    Nearest-point candidates are ordered by (distance, index); one uniform
    draw is consumed per step except when the walk is forced straight to the
    end point.  Returns 0 when start equals end.
    """
    if base.directed:
        raise ValueError("path sampling applies to undirected inputs")
    n = base.n
    start = _check_index(start, n, "start")
    end = _check_index(end, n, "end")
    if start == end:
        return 0.0
    vals = base.values
    remaining = np.ones(n, dtype=bool)
    remaining[start] = False
    cur = start
    max_jump = 0.0
    while cur != end:
        d = np.where(remaining, vals[cur], np.inf)
        order = np.argsort(d, kind="stable")
        kk = min(cfg.k_neighbors, int(remaining.sum()))
        nearest = int(order[0])
        if nearest == end:
            nxt = end
        else:
            idx = min(int(rng.random() * kk), kk - 1)
            nxt = int(order[idx])
        jump = float(vals[cur, nxt])
        if jump > max_jump:
            max_jump = jump
        remaining[nxt] = False
        cur = nxt
    return max_jump


def _run_walks(
    vals: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    uniforms: np.ndarray,
    k_neighbors: int,
) -> np.ndarray:
    """Advance a whole population of stochastic-greedy walks in lockstep.

    Walk w goes from ``starts[w]`` to ``ends[w]`` consuming ``uniforms[w]``
    left to right, one draw per non-forced step; the return value is each
    walk's maximum jump.  Candidate ranking reuses a single stable argsort of
    the base matrix: masking visited points to infinity never reorders the
    unvisited ones, so the r-th unvisited point in a point's precomputed
    neighbor order is exactly the r-th nearest remaining point with ties
    broken by index, as in :func:`sample_path_max_jump`.
    """
    n = vals.shape[0]
    w = starts.size
    neighbor_order = np.argsort(vals, axis=1, kind="stable")
    position = np.empty((n, n), dtype=np.int32)  # inverse of neighbor_order
    position[np.arange(n)[:, None], neighbor_order] = np.arange(n, dtype=np.int32)[None, :]
    cur = starts.copy()
    visited = np.zeros((w, n), dtype=bool)
    visited[np.arange(w), cur] = True
    draws = np.zeros(w, dtype=np.int64)
    best = np.zeros(w)
    remaining = np.full(w, n - 1, dtype=np.int64)
    active = np.flatnonzero(cur != ends)
    while active.size:
        order = neighbor_order[cur[active]]
        unvisited = ~np.take_along_axis(visited[active], order, axis=1)
        rank = unvisited.cumsum(axis=1, dtype=np.int32)
        rows = np.arange(active.size)
        # the end point stays unvisited while a walk runs, so it is the
        # nearest remaining point exactly when its unvisited-rank is 1
        forced = rank[rows, position[cur[active], ends[active]]] == 1
        kk = np.minimum(k_neighbors, remaining[active])
        pick = np.minimum((uniforms[active, draws[active]] * kk).astype(np.int32), kk - 1)
        choice = order[rows, (rank == (pick + 1)[:, None]).argmax(axis=1)]
        nxt = np.where(forced, ends[active], choice)
        draws[active[~forced]] += 1
        best[active] = np.maximum(best[active], vals[cur[active], nxt])
        visited[active, nxt] = True
        cur[active] = nxt
        remaining[active] -= 1
        active = active[nxt != ends[active]]
    return best


def sample_pair_jump_maxima(base: BaseDistanceMatrix, i: int, j: int, cfg: SamplerConfig) -> np.ndarray:
    """Maximum jumps of ``cfg.num_paths`` sampled paths between one pair.

    All walks advance together (one vectorized step per round), but each walk
    consumes its own slice of the pair's seed stream, so entry ``p`` is
    independent of ``cfg.num_paths``.
    """
    if base.directed:
        raise ValueError("path sampling applies to undirected inputs")
    n = base.n
    i = _check_index(i, n, "start")
    j = _check_index(j, n, "end")
    paths = cfg.num_paths
    if i == j:
        return np.zeros(paths)
    uniforms = _pair_uniforms(cfg.seed, i, j, paths, max(n - 1, 1))
    starts = np.full(paths, i, dtype=np.int64)
    ends = np.full(paths, j, dtype=np.int64)
    return _run_walks(base.values, starts, ends, uniforms, cfg.k_neighbors)


def estimate_mmj_pair(base: BaseDistanceMatrix, i: int, j: int, cfg: SamplerConfig) -> float:
    """Upper-bound estimate for one pair: min over the sampled path maxima."""
    if int(i) == int(j):
        _check_index(i, base.n, "start")
        return 0.0
    return float(sample_pair_jump_maxima(base, i, j, cfg).min())


def _chain_component(vals: np.ndarray, start: int, delta: float) -> np.ndarray:
    # Points reachable from start by hops of base distance strictly below
    # delta (the start itself always included).
    member = np.zeros(vals.shape[0], dtype=bool)
    member[start] = True
    frontier = member
    while frontier.any():
        reached = (vals[frontier] < delta).any(axis=0)
        frontier = reached & ~member
        member |= frontier
    return member


def _copy_from(vals: np.ndarray, i: int, j: int, delta: float, out: np.ndarray) -> None:
    # Recursive copy region of a pair: starting from (i, j), every pair
    # (p, q) with d(a, p) < delta and d(b, q) < delta for an already-reached
    # pair (a, b) joins in.  One endpoint can always stay put (self distance
    # 0 < delta), so the closure over unordered pairs factorizes into the
    # per-endpoint chain components; the literal breadth-first pair
    # propagation in the test suite cross-checks this.  Region membership
    # depends only on base distances, never on previously copied values, so
    # the min-resolved result is independent of source order.
    ci = _chain_component(vals, i, delta)
    cj = _chain_component(vals, j, delta)
    region = ci[:, None] & cj[None, :]
    region |= region.T
    np.fill_diagonal(region, False)
    improve = region & (delta < out)
    out[improve] = delta


def mmj_by_estimation_and_copy(base: BaseDistanceMatrix, cfg: SamplerConfig) -> MmjMatrix:
    """Approximate all-pairs matrix: per-pair estimates plus copy propagation.

    Every entry is an upper bound on the exact distance; the diagonal is 0.
    With ``copy_enabled`` each pair's own estimate is propagated to all
    strictly-qualifying pairs, and every cell keeps the minimum of all values
    written to it.
    """
    if base.directed:
        raise ValueError("estimation applies to undirected inputs")
    n = base.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    est = np.zeros((n, n))
    paths = cfg.num_paths
    cols = max(n - 1, 1)
    # Walk populations are processed in bounded chunks: every pair draws its
    # own stream, so splitting changes nothing but the working-set size.
    chunk = max(1, 25_000 // paths)
    for lo in range(0, len(pairs), chunk):
        block = pairs[lo : lo + chunk]
        starts = np.repeat([p[0] for p in block], paths)
        ends = np.repeat([p[1] for p in block], paths)
        uniforms = np.vstack([_pair_uniforms(cfg.seed, i, j, paths, cols) for i, j in block])
        maxima = _run_walks(base.values, starts, ends, uniforms, cfg.k_neighbors)
        per_pair = maxima.reshape(len(block), paths).min(axis=1)
        for (i, j), value in zip(block, per_pair):
            est[i, j] = est[j, i] = value
    if not cfg.copy_enabled:
        return MmjMatrix(est, directed=False)
    out = est.copy()
    for i in range(n):
        for j in range(i + 1, n):
            _copy_from(base.values, i, j, est[i, j], out)
    return MmjMatrix(out, directed=False)
