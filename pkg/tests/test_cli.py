import json

import numpy as np

from mmj import io
from mmj.cli import main

from conftest import F1_BASE, F1_MMJ
from synthetic import three_blobs


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_f1(tmp_path):
    path = tmp_path / "f1.csv"
    io.write_matrix_csv(path, F1_BASE)
    return path


def write_blobs(tmp_path, n=45):
    pts, truth = three_blobs(n=n)
    path = tmp_path / "blobs.csv"
    io.atomic_write_text(path, "\n".join(",".join(io.fmt(v) for v in row) for row in pts) + "\n")
    return path, pts, truth


def test_matrix_command_on_fixture(tmp_path, capsys):
    f1 = write_f1(tmp_path)
    out = tmp_path / "M.csv"
    code, stdout, _ = run(capsys, "matrix", "--precomputed", str(f1), "--engine", "mst", "--out", str(out))
    assert code == 0
    summary = json.loads(stdout)
    assert summary["engine"] == "mst" and summary["n"] == 4
    assert np.array_equal(io.read_matrix_csv(out), F1_MMJ)
    meta = json.loads(io.sidecar_path(out).read_text())
    assert meta == {"n": 4, "directed": False, "engine": "mst", "base_metric": "precomputed", "seed": 0}


def test_matrix_round_trip_bit_identical(tmp_path, capsys):
    blobs, _, _ = write_blobs(tmp_path, n=30)
    out1 = tmp_path / "m1.csv"
    out2 = tmp_path / "m2.csv"
    assert run(capsys, "matrix", "--points", str(blobs), "--out", str(out1))[0] == 0
    io.write_matrix_csv(out2, io.read_matrix_csv(out1))
    assert out1.read_bytes() == out2.read_bytes()


def test_matrix_tree_export(tmp_path, capsys):
    f1 = write_f1(tmp_path)
    tree_csv = tmp_path / "tree.csv"
    code, _, _ = run(capsys, "matrix", "--precomputed", str(f1), "--out", str(tmp_path / "m.csv"),
                     "--tree-out", str(tree_csv))
    assert code == 0
    rows = {tuple(line.split(",")[:2]) for line in tree_csv.read_text().strip().splitlines()}
    assert rows == {("1", "3"), ("0", "3"), ("1", "2")}


def test_matrix_engines_agree(tmp_path, capsys):
    f1 = write_f1(tmp_path)
    outs = {}
    for engine in ("brute", "recursion", "mst", "sample"):
        out = tmp_path / f"{engine}.csv"
        code, _, _ = run(capsys, "matrix", "--precomputed", str(f1), "--engine", engine,
                         "--out", str(out), "--seed", "1", "--paths", "200")
        assert code == 0
        outs[engine] = io.read_matrix_csv(out)
    for engine, vals in outs.items():
        assert np.array_equal(vals, F1_MMJ), engine


def test_matrix_directed_requires_precomputed(tmp_path, capsys):
    blobs, _, _ = write_blobs(tmp_path)
    code, _, err = run(capsys, "matrix", "--points", str(blobs), "--directed", "--out", str(tmp_path / "m.csv"))
    assert code == 1
    assert "precomputed" in err


def test_cluster_score_sweep_pipeline(tmp_path, capsys):
    blobs, pts, truth = write_blobs(tmp_path)
    labels_csv = tmp_path / "labels.csv"
    report_json = tmp_path / "report.json"
    code, stdout, _ = run(
        capsys, "cluster", "--points", str(blobs), "--k", "3", "--seed", "0",
        "--out", str(labels_csv), "--report", str(report_json),
    )
    assert code == 0
    summary = json.loads(stdout)
    assert summary["k"] == 3 and summary["iterations"] >= 1
    labels = io.read_labels_csv(labels_csv)
    assert len(labels) == len(pts)
    report = json.loads(report_json.read_text())
    assert len(report["centers"]) == 3

    code, stdout, _ = run(
        capsys, "score", "--index", "mmj_sc", "--labels", str(labels_csv), "--points", str(blobs),
    )
    assert code == 0
    score = json.loads(stdout)
    assert 0.5 < score["value"] <= 1.0

    sweep_csv = tmp_path / "sweep.csv"
    code, stdout, _ = run(
        capsys, "sweep", "--points", str(blobs), "--index", "mmj_sc", "--k", "2..4",
        "--seed", "0", "--n-init", "3", "--out", str(sweep_csv),
    )
    assert code == 0
    sweep = json.loads(stdout)
    assert sweep["best_k"] == 3
    assert sweep_csv.read_text().startswith("k,value")


def test_predict_and_grid(tmp_path, capsys):
    blobs, pts, truth = write_blobs(tmp_path)
    labels_csv = tmp_path / "labels.csv"
    model_json = tmp_path / "model.json"
    assert run(
        capsys, "cluster", "--points", str(blobs), "--k", "3", "--seed", "0",
        "--out", str(labels_csv), "--model-out", str(model_json),
    )[0] == 0

    queries = tmp_path / "queries.csv"
    io.atomic_write_text(queries, "\n".join(",".join(io.fmt(v) for v in row) for row in pts[:5]) + "\n")
    pred_csv = tmp_path / "pred.csv"
    code, stdout, _ = run(capsys, "predict", "--model", str(model_json), "--points", str(queries),
                          "--out", str(pred_csv))
    assert code == 0
    assert json.loads(stdout)["n_queries"] == 5
    rows = pred_csv.read_text().strip().splitlines()
    assert rows[0] == "index,label"
    assert len(rows) == 6

    grid_csv = tmp_path / "grid.csv"
    code, stdout, _ = run(capsys, "predict", "--model", str(model_json), "--grid", "5", "4",
                          "--out", str(grid_csv))
    assert code == 0
    lines = grid_csv.read_text().strip().splitlines()
    assert lines[0] == "x,y,label"
    assert len(lines) == 1 + 5 * 4


def test_predict_grid_rejects_non_2d_model(tmp_path, capsys):
    pts_csv = tmp_path / "pts1d.csv"
    pts_csv.write_text("0\n1\n10\n11\n")
    model_json = tmp_path / "m1d.json"
    assert run(capsys, "cluster", "--points", str(pts_csv), "--k", "2", "--seed", "0",
               "--out", str(tmp_path / "l.csv"), "--model-out", str(model_json))[0] == 0
    code, _, err = run(capsys, "predict", "--model", str(model_json), "--grid", "3", "3",
                       "--out", str(tmp_path / "g.csv"))
    assert code == 1
    assert "2-D" in err


def test_cluster_deterministic_given_seed(tmp_path, capsys):
    blobs, _, _ = write_blobs(tmp_path, n=30)
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for out in (out_a, out_b):
        assert run(capsys, "cluster", "--points", str(blobs), "--k", "3", "--seed", "11",
                   "--out", str(out))[0] == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_widest_command(tmp_path, capsys):
    graph = tmp_path / "g.csv"
    io.write_edge_csv(graph, 3, [(0, 1, 5.0), (1, 2, 4.0), (0, 2, 1.0)])
    out = tmp_path / "w.csv"
    code, stdout, _ = run(capsys, "widest", "--graph", str(graph), "--directed", "--out", str(out))
    assert code == 0
    vals = io.read_matrix_csv(out)
    assert vals[0, 2] == 4.0
    assert np.isinf(vals[0, 0])

    out2 = tmp_path / "w2.csv"
    code, _, _ = run(capsys, "widest", "--graph", str(graph), "--method", "max-tree", "--out", str(out2))
    assert code == 0
    assert io.read_matrix_csv(out2)[0, 2] == 4.0


def test_compare_engines(tmp_path, capsys):
    blobs, _, _ = write_blobs(tmp_path, n=24)
    code, stdout, _ = run(capsys, "compare-engines", "--points", str(blobs), "--seed", "0",
                          "--paths", "30")
    assert code == 0
    summary = json.loads(stdout)
    assert summary["recursion_equals_mst"] is True
    assert summary["sample"]["all_upper_bounds"] is True
    assert 0.0 <= summary["sample"]["fraction_exact"] <= 1.0


def test_ci_mode_requires_seed(tmp_path, capsys, monkeypatch):
    blobs, _, _ = write_blobs(tmp_path, n=24)
    monkeypatch.setenv("CI", "1")
    code, _, err = run(capsys, "cluster", "--points", str(blobs), "--k", "3",
                       "--out", str(tmp_path / "l.csv"))
    assert code == 1
    assert "seed" in err
    code, _, _ = run(capsys, "cluster", "--points", str(blobs), "--k", "3", "--seed", "5",
                     "--out", str(tmp_path / "l.csv"))
    assert code == 0
    # non-randomized commands stay seedless in CI
    f1 = write_f1(tmp_path)
    code, _, _ = run(capsys, "matrix", "--precomputed", str(f1), "--engine", "mst",
                     "--out", str(tmp_path / "m.csv"))
    assert code == 0


def test_malformed_csv_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0\noops,1\n")
    code, _, err = run(capsys, "matrix", "--points", str(bad), "--out", str(tmp_path / "m.csv"))
    assert code == 1
    assert "bad.csv:2" in err


def test_mmj_threads_validation(tmp_path, capsys, monkeypatch):
    f1 = write_f1(tmp_path)
    monkeypatch.setenv("MMJ_THREADS", "zero")
    code, _, err = run(capsys, "matrix", "--precomputed", str(f1), "--out", str(tmp_path / "m.csv"))
    assert code == 1 and "MMJ_THREADS" in err
    monkeypatch.setenv("MMJ_THREADS", "2")
    assert run(capsys, "matrix", "--precomputed", str(f1), "--out", str(tmp_path / "m.csv"))[0] == 0
