"""Command-line surface: matrix computation, clustering, scoring, sweeps,
prediction, widest paths, and engine cross-checks.

Every command prints a single JSON summary line to stdout and writes its
declared artifacts atomically; errors go to stderr with a nonzero exit.  All
randomized commands take ``--seed`` (default 0); with ``CI=1`` in the
environment the seed must be passed explicitly.  ``MMJ_THREADS`` caps worker
parallelism (the current engines run sequentially, which satisfies any cap).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from mmj import io
from mmj.base_metrics import BaseDistanceMatrix, BaseMetric, PointSet, pairwise_base_matrix
from mmj.classifier import decision_grid, fit_classifier, load_model, predict, predict_global, save_model
from mmj.clustering import KmeansConfig, mmj_kmeans
from mmj.evaluation import INDEX_NAMES, _score, sweep_k
from mmj.exact import DEFAULT_BRUTE_FORCE_CAP, mmj_brute_force, mmj_by_recursion, mmj_by_recursion_directed
from mmj.mst import build_mst, mmj_by_mst
from mmj.sampling import SamplerConfig, mmj_by_estimation_and_copy
from mmj.widest import CapacityGraph, widest_path_by_max_spanning_tree, widest_path_matrix

RANDOMIZED = {"cluster", "sweep", "compare-engines"}


def _emit(summary: dict) -> None:
    print(json.dumps(summary))


def _metric_from_args(args) -> BaseMetric:
    if args.metric == "minkowski":
        return BaseMetric("minkowski", args.minkowski_p)
    return BaseMetric(args.metric)


def _load_base(args) -> tuple[BaseDistanceMatrix, str]:
    directed = bool(getattr(args, "directed", False))
    if getattr(args, "precomputed", None):
        vals = io.read_matrix_csv(args.precomputed)
        return BaseDistanceMatrix(vals, directed=directed), "precomputed"
    if directed:
        raise ValueError("--directed requires --precomputed (coordinates give symmetric distances)")
    pts = PointSet(io.read_points_csv(args.points))
    metric = _metric_from_args(args)
    return pairwise_base_matrix(pts, metric), metric.kind


def _resolve_seed(args) -> int:
    seed = getattr(args, "seed", None)
    if seed is not None:
        return int(seed)
    randomized = args.command in RANDOMIZED or getattr(args, "engine", None) == "sample"
    if randomized and os.environ.get("CI") == "1":
        raise ValueError("CI mode requires an explicit --seed on randomized commands")
    return 0


def _compute_matrix(base: BaseDistanceMatrix, engine: str, args, seed: int) -> np.ndarray:
    if engine == "mst":
        return mmj_by_mst(base).values
    if engine == "recursion":
        if base.directed:
            return mmj_by_recursion_directed(base).values
        return mmj_by_recursion(base).values
    if engine == "brute":
        return mmj_brute_force(base, cap=args.brute_cap).values
    if engine == "sample":
        cfg = SamplerConfig(
            k_neighbors=args.k_neighbors,
            num_paths=args.paths,
            seed=seed,
            copy_enabled=not args.no_copy,
        )
        return mmj_by_estimation_and_copy(base, cfg).values
    raise ValueError(f"unknown engine {engine!r}")


def cmd_matrix(args) -> int:
    seed = _resolve_seed(args)
    base, metric_kind = _load_base(args)
    engine = args.engine or ("recursion" if base.directed else "mst")
    if engine == "mst" and base.directed:
        raise ValueError("the mst engine requires an undirected input; use --engine recursion")
    t0 = time.perf_counter()
    vals = _compute_matrix(base, engine, args, seed)
    elapsed = time.perf_counter() - t0
    io.write_matrix_csv(args.out, vals)
    io.write_matrix_metadata(
        args.out,
        {"n": base.n, "directed": base.directed, "engine": engine, "base_metric": metric_kind, "seed": seed},
    )
    if args.tree_out:
        io.write_tree_csv(args.tree_out, build_mst(base).edges)
    _emit({"command": "matrix", "engine": engine, "n": base.n, "directed": base.directed,
           "elapsed_s": round(elapsed, 6), "out": str(args.out)})
    return 0


def cmd_cluster(args) -> int:
    seed = _resolve_seed(args)
    pts = PointSet(io.read_points_csv(args.points))
    metric = _metric_from_args(args)
    base = pairwise_base_matrix(pts, metric)
    mmjm = mmj_by_mst(base) if args.engine == "mst" else mmj_by_recursion(base)
    cfg = KmeansConfig(
        k=args.k,
        max_iter=args.max_iter,
        n_init=args.n_init,
        seed=seed,
        center_update="pam_swap" if args.pam else "one_scom",
    )
    t0 = time.perf_counter()
    result = mmj_kmeans(mmjm, cfg)
    elapsed = time.perf_counter() - t0
    io.write_labels_csv(args.out, result.labels, result.border_status)
    report = {
        "k": args.k,
        "objective": result.objective,
        "iterations": result.n_iter,
        "centers": result.centers,
        "seed": seed,
    }
    if args.report:
        io.atomic_write_text(args.report, json.dumps(report, indent=2) + "\n")
    if args.model_out:
        model = fit_classifier(pts, result.labels, mode=args.model_mode, metric=metric, engine=args.engine)
        save_model(model, args.model_out)
    _emit({"command": "cluster", "engine": args.engine, "n": pts.n, "elapsed_s": round(elapsed, 6),
           "out": str(args.out), **report})
    return 0


def cmd_score(args) -> int:
    labels = io.read_labels_csv(args.labels)
    if args.matrix:
        scoring = io.read_matrix_csv(args.matrix)
    else:
        if not args.points:
            raise ValueError("score needs --points or --matrix")
        pts = PointSet(io.read_points_csv(args.points))
        base = pairwise_base_matrix(pts, _metric_from_args(args))
        if args.index.startswith("mmj_"):
            scoring = (mmj_by_mst(base) if args.engine == "mst" else mmj_by_recursion(base)).values
        else:
            scoring = base.values
    score = _score(args.index, scoring, labels, saturate=True)
    _emit({"command": "score", "index": score.name, "value": score.value, "better": score.better,
           "saturated": score.saturated, "n": int(len(labels))})
    return 0


def _parse_k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(k) for k in text.split(",")]


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    pts = io.read_points_csv(args.points)
    t0 = time.perf_counter()
    result = sweep_k(
        pts,
        _parse_k_range(args.k),
        engine=args.engine,
        index=args.index,
        metric=_metric_from_args(args),
        seed=seed,
        n_init=args.n_init,
        max_iter=args.max_iter,
    )
    elapsed = time.perf_counter() - t0
    if args.out:
        io.write_sweep_csv(args.out, result.rows)
    _emit({"command": "sweep", "index": args.index, "best_k": result.best_k,
           "rows": [{"k": k, "value": s.value, "saturated": s.saturated} for k, s in result.rows],
           "elapsed_s": round(elapsed, 6), "seed": seed})
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    predictor = predict if model.mode == "per_cluster" else predict_global
    if args.grid:
        if model.points.shape[1] != 2:
            raise ValueError("decision grids are only defined for 2-D models")
        nx, ny = args.grid
        if args.bounds:
            bounds = tuple(args.bounds)
        else:
            lo = model.points.min(axis=0)
            hi = model.points.max(axis=0)
            margin = 0.1 * (hi - lo)
            bounds = (lo[0] - margin[0], hi[0] + margin[0], lo[1] - margin[1], hi[1] + margin[1])
        grid = decision_grid(model, bounds, (nx, ny), mode=model.mode)
        io.write_grid_csv(args.out, grid)
        _emit({"command": "predict", "mode": model.mode, "grid": [nx, ny],
               "border_cells": int((grid.labels == -1).sum()), "out": str(args.out)})
        return 0
    if not args.points:
        raise ValueError("predict needs --points or --grid")
    queries = io.read_points_csv(args.points)
    results = [predictor(q, model) for q in queries]
    lines = ["index,label"]
    lines += [f"{i},{r.label}" for i, r in enumerate(results)]
    io.atomic_write_text(args.out, "\n".join(lines) + "\n")
    _emit({"command": "predict", "mode": model.mode, "n_queries": len(results),
           "border_points": sum(r.is_border for r in results), "out": str(args.out)})
    return 0


def cmd_widest(args) -> int:
    g = CapacityGraph.from_edge_csv(args.graph, directed=args.directed)
    t0 = time.perf_counter()
    if args.method == "max-tree":
        result = widest_path_by_max_spanning_tree(g)
    else:
        result = widest_path_matrix(g)
    elapsed = time.perf_counter() - t0
    io.write_capacity_matrix_csv(args.out, result.values)
    _emit({"command": "widest", "method": args.method, "n": g.n, "directed": g.directed,
           "elapsed_s": round(elapsed, 6), "out": str(args.out)})
    return 0


def cmd_compare_engines(args) -> int:
    seed = _resolve_seed(args)
    pts = PointSet(io.read_points_csv(args.points))
    base = pairwise_base_matrix(pts, _metric_from_args(args))
    t0 = time.perf_counter()
    rec = mmj_by_recursion(base).values
    t_rec = time.perf_counter() - t0
    t0 = time.perf_counter()
    mst = mmj_by_mst(base).values
    t_mst = time.perf_counter() - t0
    summary = {
        "command": "compare-engines",
        "n": base.n,
        "recursion_equals_mst": bool(np.array_equal(rec, mst)),
        "recursion_s": round(t_rec, 6),
        "mst_s": round(t_mst, 6),
        "seed": seed,
    }
    if base.n <= args.brute_cap:
        brute = mmj_brute_force(base, cap=args.brute_cap).values
        summary["brute_equals_mst"] = bool(np.array_equal(brute, mst))
    cfg = SamplerConfig(k_neighbors=args.k_neighbors, num_paths=args.paths, seed=seed)
    t0 = time.perf_counter()
    est = mmj_by_estimation_and_copy(base, cfg).values
    t_sample = time.perf_counter() - t0
    over = est - mst
    off = ~np.eye(base.n, dtype=bool)
    summary["sample"] = {
        "max_overestimate": float(over[off].max()) if base.n > 1 else 0.0,
        "mean_overestimate": float(over[off].mean()) if base.n > 1 else 0.0,
        "fraction_exact": float((over[off] == 0).mean()) if base.n > 1 else 1.0,
        "all_upper_bounds": bool(np.all(over >= 0)),
        "elapsed_s": round(t_sample, 6),
    }
    _emit(summary)
    return 0


def _add_metric_args(sub) -> None:
    sub.add_argument("--metric", default="euclidean",
                     choices=["euclidean", "manhattan", "chebyshev", "minkowski"])
    sub.add_argument("--minkowski-p", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmj", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("matrix", help="compute an all-pairs min-max-jump matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--points")
    src.add_argument("--precomputed")
    _add_metric_args(p)
    p.add_argument("--engine", choices=["brute", "recursion", "mst", "sample"], default=None)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--k-neighbors", type=int, default=3)
    p.add_argument("--no-copy", action="store_true")
    p.add_argument("--brute-cap", type=int, default=DEFAULT_BRUTE_FORCE_CAP)
    p.add_argument("--tree-out", default=None, help="also export the spanning tree as 'u,v,w' rows")
    p.set_defaults(func=cmd_matrix)

    p = subs.add_parser("cluster", help="cluster points under min-max-jump distance")
    p.add_argument("--points", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--engine", choices=["recursion", "mst"], default="mst")
    _add_metric_args(p)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pam", action="store_true", help="PAM-style swap search for centers")
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--model-out", default=None)
    p.add_argument("--model-mode", choices=["per_cluster", "global"], default="per_cluster")
    p.set_defaults(func=cmd_cluster)

    p = subs.add_parser("score", help="score a labeling with an evaluation index")
    p.add_argument("--index", required=True, choices=list(INDEX_NAMES))
    p.add_argument("--labels", required=True)
    p.add_argument("--points", default=None)
    p.add_argument("--matrix", default=None)
    p.add_argument("--engine", choices=["recursion", "mst"], default="mst")
    _add_metric_args(p)
    p.set_defaults(func=cmd_score)

    p = subs.add_parser("sweep", help="sweep k and pick the index-optimal value")
    p.add_argument("--points", required=True)
    p.add_argument("--index", required=True, choices=list(INDEX_NAMES))
    p.add_argument("--k", required=True, help="range like 2..8 or list like 2,3,5")
    p.add_argument("--engine", choices=["recursion", "mst"], default="mst")
    _add_metric_args(p)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("predict", help="predict labels for new points or a decision grid")
    p.add_argument("--model", required=True)
    p.add_argument("--points", default=None)
    p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"), default=None)
    p.add_argument("--bounds", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = subs.add_parser("widest", help="all-pairs widest-path capacities")
    p.add_argument("--graph", required=True, help="edge CSV with a '#n=<N>' header")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--method", choices=["recursion", "max-tree"], default="recursion")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_widest)

    p = subs.add_parser("compare-engines", help="cross-check all engines on one input")
    p.add_argument("--points", required=True)
    _add_metric_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--k-neighbors", type=int, default=3)
    p.add_argument("--brute-cap", type=int, default=DEFAULT_BRUTE_FORCE_CAP)
    p.set_defaults(func=cmd_compare_engines)

    return parser


def _validate_env() -> None:
    threads = os.environ.get("MMJ_THREADS")
    if threads is not None:
        try:
            value = int(threads)
        except ValueError:
            raise ValueError(f"MMJ_THREADS must be an integer, got {threads!r}") from None
        if value < 1:
            raise ValueError("MMJ_THREADS must be >= 1")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate_env()
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
