"""CSV and JSON plumbing shared by the library and the CLI.

All numeric output uses 17 significant digits, which round-trips float64
bit-exactly (including ``inf``).  Files are written atomically: a temp file
in the target directory, then a rename.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_csv(path, values: np.ndarray) -> None:
    values = np.asarray(values, dtype=float)
    lines = [",".join(fmt(x) for x in row) for row in values]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix_csv(path, square: bool = True) -> np.ndarray:
    path = Path(path)
    rows = []
    width = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric cell in {line!r}") from None
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    vals = np.asarray(rows, dtype=float)
    if square and vals.shape[0] != vals.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got shape {vals.shape}")
    return vals


def read_points_csv(path) -> np.ndarray:
    """One row per point, numeric columns, optional single header line."""
    path = Path(path)
    rows = []
    width = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        try:
            parsed = [float(c) for c in cells]
        except ValueError:
            if lineno == 1 and not rows:
                continue  # header
            raise ValueError(f"{path}:{lineno}: non-numeric cell in {line!r}") from None
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise ValueError(f"{path}:{lineno}: expected {width} columns, got {len(parsed)}")
        rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_labels_csv(path, labels, border_status=None) -> None:
    lines = ["index,label,border_status"]
    for i, lab in enumerate(labels):
        status = "none" if border_status is None else str(border_status[i])
        lines.append(f"{i},{int(lab)},{status}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_labels_csv(path) -> np.ndarray:
    path = Path(path)
    pairs = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        if lineno == 1 and not cells[0].strip().isdigit():
            continue  # header
        if len(cells) < 2:
            raise ValueError(f"{path}:{lineno}: expected 'index,label[,border_status]'")
        try:
            pairs.append((int(cells[0]), int(cells[1])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
    if not pairs:
        raise ValueError(f"{path}: no label rows")
    pairs.sort()
    if [p[0] for p in pairs] != list(range(len(pairs))):
        raise ValueError(f"{path}: label indices must cover 0..{len(pairs) - 1}")
    return np.asarray([p[1] for p in pairs], dtype=int)


def sidecar_path(out_path) -> Path:
    out_path = Path(out_path)
    if out_path.suffix:
        return out_path.with_suffix(".meta.json")
    return Path(str(out_path) + ".meta.json")


def write_matrix_metadata(out_path, meta: dict) -> Path:
    side = sidecar_path(out_path)
    atomic_write_text(side, json.dumps(meta, indent=2) + "\n")
    return side


def write_capacity_matrix_csv(path, values: np.ndarray) -> None:
    write_matrix_csv(path, values)  # inf serializes as the literal token 'inf'


def write_edge_csv(path, n: int, edges) -> None:
    lines = [f"#n={n}"]
    lines += [f"{int(u)},{int(v)},{fmt(w)}" for u, v, w in edges]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_tree_csv(path, edges) -> None:
    lines = [f"{int(u)},{int(v)},{fmt(w)}" for u, v, w in edges]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_grid_csv(path, grid) -> None:
    lines = ["x,y,label"]
    lines += [f"{fmt(x)},{fmt(y)},{label}" for x, y, label in grid.rows()]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(path, rows) -> None:
    lines = ["k,value"]
    lines += [f"{int(k)},{fmt(score.value)}" for k, score in rows]
    atomic_write_text(path, "\n".join(lines) + "\n")
