"""Internal clustering evaluation indices over an arbitrary distance matrix.

Passing a min-max-jump matrix gives the mmj variants of the silhouette,
Calinski-Harabasz, and Davies-Bouldin indices; passing a plain base-distance
matrix gives the standard matrix-based counterparts.  Cluster centroids are
replaced throughout by the set-center used in clustering (the member with
the smallest summed squared distance to its set).  Where a formula needs a
distance to a center whose tie set holds several members, the distance is
averaged over the tied representatives, which keeps every index invariant
under point reordering and cluster relabeling.

``sweep_k`` runs the clusterer across a range of k and picks the k that
optimizes a chosen index, which is how the indices are used for model
selection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mmj.base_metrics import BaseMetric, EUCLIDEAN, PointSet, pairwise_base_matrix
from mmj.clustering import KmeansConfig, mmj_kmeans, one_scom, _matrix_values
from mmj.exact import mmj_by_recursion
from mmj.mst import mmj_by_mst

INDEX_NAMES = ("sc", "ch", "db", "mmj_sc", "mmj_ch", "mmj_db")


@dataclass(frozen=True)
class IndexScore:
    name: str
    value: float
    better: str  # "higher" or "lower"
    saturated: bool = False


def _labels_and_classes(distance, labels):
    vals = _matrix_values(distance)
    y = np.asarray(labels, dtype=int)
    if y.shape != (vals.shape[0],):
        raise ValueError(f"labels shape {y.shape} does not match matrix of {vals.shape[0]} points")
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("evaluation indices need at least 2 clusters")
    return vals, y, classes


def silhouette(distance, labels, name: str = "sc") -> IndexScore:
    """Mean silhouette value: (b - a) / max(a, b) per sample.

    ``a`` is the mean distance to the other members of the sample's own
    cluster; ``b`` is the smallest mean distance to the members of any other
    cluster.  Samples in singleton clusters score 0.
    """
    vals, y, classes = _labels_and_classes(distance, labels)
    n = y.size
    sums = np.stack([vals[:, y == c].sum(axis=1) for c in classes], axis=1)
    counts = np.array([(y == c).sum() for c in classes])
    own = np.searchsorted(classes, y)
    own_count = counts[own]
    rows = np.arange(n)
    a = np.where(own_count > 1, sums[rows, own] / np.maximum(own_count - 1, 1), 0.0)
    mean_other = sums / counts[None, :]
    mean_other[rows, own] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own_count == 1) | (denom == 0), 0.0, (b - a) / np.where(denom == 0, 1.0, denom))
    return IndexScore(name=name, value=float(s.mean()), better="higher")


def _members_and_centers(vals, y, classes, centers):
    members = [np.flatnonzero(y == c) for c in classes]
    if centers is None:
        centers = [one_scom(vals, m) for m in members]
    if len(centers) != len(classes):
        raise ValueError(f"expected {len(classes)} center sets, got {len(centers)}")
    return members, [list(c) for c in centers]


def _to_center(vals, points, center) -> np.ndarray:
    # Distance of each point to a center, averaged over tied representatives.
    return vals[np.ix_(np.atleast_1d(points), center)].mean(axis=1)


def _center_to_center(vals, center_a, center_b) -> float:
    return float(vals[np.ix_(center_a, center_b)].mean())


def calinski_harabasz(distance, labels, centers=None, name: str = "ch") -> IndexScore:
    """Between-center over within-center squared dispersion, df-normalized.

    Set centers stand in for centroids; when ``centers`` is omitted they are
    recomputed from the supplied matrix.  Zero within-dispersion is reported
    as a saturated infinite score rather than an error.
    """
    vals, y, classes = _labels_and_classes(distance, labels)
    n = y.size
    k = classes.size
    if n == k:
        raise ValueError("every point is its own cluster: zero degrees of freedom")
    members, centers = _members_and_centers(vals, y, classes, centers)
    global_center = one_scom(vals, np.arange(n))
    between = sum(
        len(m) * _center_to_center(vals, c, global_center) ** 2 for m, c in zip(members, centers)
    ) / (k - 1)
    within = sum(
        float((_to_center(vals, m, c) ** 2).sum()) for m, c in zip(members, centers)
    ) / (n - k)
    if within == 0.0:
        return IndexScore(name=name, value=np.inf, better="higher", saturated=True)
    return IndexScore(name=name, value=between / within, better="higher")


def davies_bouldin(distance, labels, centers=None, name: str = "db", saturate: bool = False) -> IndexScore:
    """Mean over clusters of the worst (S_i + S_j) / D(center_i, center_j).

    ``S_i`` is the mean distance of cluster members to their center.  Two
    clusters with coincident centers make the index undefined; that raises a
    diagnostic unless ``saturate`` asks for a flagged infinite score (used by
    sweeps, which must complete).
    """
    vals, y, classes = _labels_and_classes(distance, labels)
    k = classes.size
    members, centers = _members_and_centers(vals, y, classes, centers)
    scatter = np.array([float(_to_center(vals, m, c).mean()) for m, c in zip(members, centers)])
    worst = np.zeros(k)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            d = _center_to_center(vals, centers[i], centers[j])
            if d == 0.0:
                if saturate:
                    return IndexScore(name=name, value=np.inf, better="lower", saturated=True)
                raise ValueError(
                    f"clusters {classes[i]} and {classes[j]} have coincident centers: index undefined"
                )
            worst[i] = max(worst[i], (scatter[i] + scatter[j]) / d)
    return IndexScore(name=name, value=float(worst.mean()), better="lower")


def _score(index: str, matrix: np.ndarray, labels: np.ndarray, saturate: bool) -> IndexScore:
    if index not in INDEX_NAMES:
        raise ValueError(f"unknown index {index!r}; expected one of {INDEX_NAMES}")
    kind = index.removeprefix("mmj_")
    if kind == "sc":
        return silhouette(matrix, labels, name=index)
    if kind == "ch":
        return calinski_harabasz(matrix, labels, name=index)
    return davies_bouldin(matrix, labels, name=index, saturate=saturate)


@dataclass(frozen=True)
class SweepResult:
    rows: list[tuple[int, IndexScore]]
    best_k: int


def sweep_k(
    points,
    k_range,
    engine: str = "mst",
    index: str = "mmj_sc",
    *,
    metric: BaseMetric = EUCLIDEAN,
    seed: int = 0,
    n_init: int = 10,
    max_iter: int = 100,
) -> SweepResult:
    """Cluster at each k, score each clustering, and return the best k.

    Clustering always runs on the min-max-jump matrix; the ``index`` prefix
    decides which matrix is scored (``mmj_*`` the same matrix, otherwise the
    base matrix).  Center sets feeding ch/db are recomputed under the scoring
    matrix.  Each k draws its own deterministic child seed.
    """
    pts = points if isinstance(points, PointSet) else PointSet(np.asarray(points, dtype=float))
    base = pairwise_base_matrix(pts, metric)
    mmjm = mmj_by_mst(base) if engine == "mst" else mmj_by_recursion(base)
    scoring = mmjm.values if index.startswith("mmj_") else base.values
    ks = [int(k) for k in k_range]
    if not ks:
        raise ValueError("empty k range")
    if min(ks) < 2 or max(ks) > pts.n - 1:
        raise ValueError(f"k range must lie within [2, {pts.n - 1}]")
    rows: list[tuple[int, IndexScore]] = []
    for k in ks:
        k_seed = int(np.random.SeedSequence(seed, spawn_key=(k,)).generate_state(1)[0])
        res = mmj_kmeans(mmjm, KmeansConfig(k=k, n_init=n_init, max_iter=max_iter, seed=k_seed))
        rows.append((k, _score(index, scoring, res.labels, saturate=True)))
    better = rows[0][1].better
    best_k, best_val = rows[0]
    for k, score in rows[1:]:
        if (better == "higher" and score.value > best_val.value) or (
            better == "lower" and score.value < best_val.value
        ):
            best_k, best_val = k, score
    return SweepResult(rows=rows, best_k=best_k)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-adjusted agreement between two labelings (permutation-safe)."""
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ValueError("labelings must have the same length")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(table).sum()
    sum_rows = comb2(table.sum(axis=1)).sum()
    sum_cols = comb2(table.sum(axis=0)).sum()
    total = comb2(a.size)
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))
