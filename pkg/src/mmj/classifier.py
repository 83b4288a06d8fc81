"""Label prediction for new points from a finished clustering.

A new point's score against cluster i is its min-max-jump distance to the
cluster's center, measured under a context that includes the new point; the
predicted label is the argmin over clusters.  Two context choices exist:

* ``per_cluster``: centers and distances live in each cluster's own matrix,
  so the score is a single-row query against that cluster plus the point;
* ``global``: centers and distances live in the full-set matrix, needing one
  query for all clusters at once.  Under this variant distant points tie
  across every cluster, which is what produces the envelope bands around
  clusters on a decision grid.

Ties are never resolved silently at predict time: an exact tie surfaces as
the border sentinel together with the tied cluster set.  Prediction is
read-only and deterministic.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mmj.base_metrics import (
    BaseMetric,
    EUCLIDEAN,
    PointSet,
    pairwise_base_matrix,
    point_to_set_distances,
)
from mmj.clustering import one_scom
from mmj.exact import mmj_by_recursion, _row_from_new_point
from mmj.mst import mmj_by_mst

BORDER_SENTINEL = -1

MODES = ("per_cluster", "global")


@dataclass(frozen=True)
class PredictedLabel:
    """A predicted cluster index, or the border sentinel when tied."""

    label: int
    tied_clusters: tuple[int, ...]

    @property
    def is_border(self) -> bool:
        return len(self.tied_clusters) > 1


@dataclass(frozen=True)
class TrainedClusters:
    """Everything needed at predict time for one context mode.

    ``scoms`` holds global point indices; for ``per_cluster`` mode
    ``matrices`` has one matrix per cluster (over that cluster's members, in
    ``members`` order), for ``global`` mode a single full-set matrix.
    """

    mode: str
    points: np.ndarray
    metric: BaseMetric
    members: list[np.ndarray]
    scoms: list[list[int]]
    matrices: list[np.ndarray]

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def fit_classifier(
    points,
    labels,
    mode: str = "per_cluster",
    metric: BaseMetric = EUCLIDEAN,
    engine: str = "mst",
) -> TrainedClusters:
    """Build the predict-time model from coordinates and cluster labels.

    Center sets are recomputed under the context the mode names: each
    cluster's own matrix for ``per_cluster`` (which differs from a slice of
    the full matrix), the full-set matrix for ``global``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    pts = points if isinstance(points, PointSet) else PointSet(np.asarray(points, dtype=float))
    y = np.asarray(labels, dtype=int)
    if y.shape != (pts.n,):
        raise ValueError("labels must assign one cluster per point")
    engine_fn = mmj_by_mst if engine == "mst" else mmj_by_recursion
    classes = np.unique(y)
    members = [np.flatnonzero(y == c) for c in classes]
    if mode == "per_cluster":
        matrices, scoms = [], []
        for mem in members:
            sub = engine_fn(pairwise_base_matrix(PointSet(pts.coords[mem]), metric)).values
            local = one_scom(sub, np.arange(mem.size))
            matrices.append(sub)
            scoms.append([int(mem[s]) for s in local])
    else:
        full = engine_fn(pairwise_base_matrix(pts, metric)).values
        matrices = [full]
        scoms = [one_scom(full, mem) for mem in members]
    return TrainedClusters(
        mode=mode,
        points=pts.coords,
        metric=metric,
        members=members,
        scoms=scoms,
        matrices=matrices,
    )


def _label_from_scores(g: np.ndarray) -> PredictedLabel:
    tied = np.flatnonzero(g == g.min())
    if tied.size > 1:
        return PredictedLabel(BORDER_SENTINEL, tuple(int(t) for t in tied))
    return PredictedLabel(int(tied[0]), (int(tied[0]),))


def _check_query(point, dim: int) -> np.ndarray:
    p = np.asarray(point, dtype=float)
    if p.shape != (dim,):
        raise ValueError(f"query point has shape {p.shape}, model expects ({dim},)")
    return p


def predict_scores(point, model: TrainedClusters) -> np.ndarray:
    """The point's distance to every cluster's center, under the model's
    context mode; multiple tied centers contribute their minimum."""
    p = _check_query(point, model.dim)
    if model.mode == "per_cluster":
        g = np.empty(model.k)
        for ci, mem in enumerate(model.members):
            d = point_to_set_distances(p, model.points[mem], model.metric)
            row = _row_from_new_point(model.matrices[ci], d)
            local = np.searchsorted(mem, model.scoms[ci])
            g[ci] = row[local].min()
        return g
    d = point_to_set_distances(p, model.points, model.metric)
    row = _row_from_new_point(model.matrices[0], d)
    return np.array([row[s].min() for s in model.scoms])


def predict(point, model: TrainedClusters) -> PredictedLabel:
    """Label a new point against per-cluster contexts (cluster + point)."""
    if model.mode != "per_cluster":
        raise ValueError("predict needs a per_cluster model; see predict_global")
    return _label_from_scores(predict_scores(point, model))


def predict_global(point, model: TrainedClusters) -> PredictedLabel:
    """Label a new point against the full-set context (all points + point)."""
    if model.mode != "global":
        raise ValueError("predict_global needs a global model; see predict")
    return _label_from_scores(predict_scores(point, model))


@dataclass(frozen=True)
class DecisionGrid:
    """Predicted labels over a 2-D lattice; border cells hold the sentinel."""

    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # shape (len(ys), len(xs))

    def rows(self):
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield float(x), float(y), int(self.labels[iy, ix])


def _axis(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("grid resolution must be >= 1")
    if count == 1:
        return np.array([(lo + hi) / 2.0])
    return np.linspace(lo, hi, count)


def decision_grid(model: TrainedClusters, bounds, resolution, mode: str | None = None) -> DecisionGrid:
    """Predict every cell of an nx-by-ny lattice over a 2-D bounding box.

    ``bounds`` is (xmin, xmax, ymin, ymax); a 1-cell axis collapses to the
    box center.  The model must be 2-D and trained for the requested mode.
    """
    if model.dim != 2:
        raise ValueError("decision grids are only defined for 2-D models")
    mode = model.mode if mode is None else mode
    if mode != model.mode:
        raise ValueError(f"model was fit for mode {model.mode!r}, not {mode!r}")
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    nx, ny = int(resolution[0]), int(resolution[1])
    xs = _axis(xmin, xmax, nx)
    ys = _axis(ymin, ymax, ny)
    predictor = predict if mode == "per_cluster" else predict_global
    labels = np.empty((ny, nx), dtype=int)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            labels[iy, ix] = predictor(np.array([x, y]), model).label
    return DecisionGrid(xs=xs, ys=ys, labels=labels)


def save_model(model: TrainedClusters, path) -> None:
    """Write the model as JSON plus sibling CSVs for points and matrices."""
    from mmj import io

    path = Path(path)
    stem = path.with_suffix("")
    points_file = stem.name + ".points.csv"
    io.write_matrix_csv(path.parent / points_file, model.points)
    matrix_files = []
    for idx, mat in enumerate(model.matrices):
        name = stem.name + (".matrix.csv" if model.mode == "global" else f".cluster{idx}.csv")
        io.write_matrix_csv(path.parent / name, mat)
        matrix_files.append(name)
    payload = {
        "mode": model.mode,
        "metric": {"kind": model.metric.kind, "p": model.metric.p},
        "members": [[int(i) for i in mem] for mem in model.members],
        "scoms": [[int(i) for i in s] for s in model.scoms],
        "points_file": points_file,
        "matrix_files": matrix_files,
    }
    io.atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def load_model(path) -> TrainedClusters:
    from mmj import io

    path = Path(path)
    payload = json.loads(path.read_text())
    metric = BaseMetric(payload["metric"]["kind"], payload["metric"]["p"])
    points = io.read_matrix_csv(path.parent / payload["points_file"], square=False)
    matrices = [io.read_matrix_csv(path.parent / f) for f in payload["matrix_files"]]
    return TrainedClusters(
        mode=payload["mode"],
        points=points,
        metric=metric,
        members=[np.asarray(m, dtype=int) for m in payload["members"]],
        scoms=[list(map(int, s)) for s in payload["scoms"]],
        matrices=matrices,
    )
