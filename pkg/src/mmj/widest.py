"""Widest path (maximum capacity path) solver.

The widest-path problem mirrors the min-max-jump problem: maximize the
minimum-capacity edge of a path instead of minimizing the maximum jump.  The
same incremental recursion solves it after three changes: a node's capacity
to itself is infinite, missing edges carry capacity zero, and the min and max
operators swap roles (so the all-pairs matrix is seeded with infinity on the
diagonal).  Unreachable pairs naturally come out as capacity 0.

For undirected graphs the spanning-tree route applies as well, with a
*maximum* spanning tree and the edge fill running from the largest capacity
down.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mmj.mst import _merge_steps, _prim_dense


@dataclass(frozen=True)
class CapacityGraph:
    """Capacity matrix of a (di)graph: inf diagonal, 0 for absent edges."""

    cap: np.ndarray
    directed: bool = False

    def __post_init__(self):
        cap = np.asarray(self.cap, dtype=float)
        if cap.ndim != 2 or cap.shape[0] != cap.shape[1]:
            raise ValueError(f"capacity matrix must be square, got shape {cap.shape}")
        if np.any(np.diagonal(cap) != np.inf):
            raise ValueError("self capacity must be infinite")
        off = ~np.eye(cap.shape[0], dtype=bool)
        if np.any(~np.isfinite(cap[off])) or np.any(cap[off] < 0):
            raise ValueError("edge capacities must be finite and non-negative")
        if not self.directed and not np.array_equal(cap, cap.T):
            raise ValueError("undirected capacity matrix must be symmetric")
        object.__setattr__(self, "cap", cap)

    @property
    def n(self) -> int:
        return self.cap.shape[0]

    @classmethod
    def from_edges(cls, n: int, edges, directed: bool = False) -> "CapacityGraph":
        """Build from (u, v, capacity) triples; unlisted pairs get 0."""
        cap = np.zeros((n, n))
        np.fill_diagonal(cap, np.inf)
        for u, v, c in edges:
            if u == v:
                raise ValueError("self capacity is implicit; omit self loops")
            cap[u, v] = c
            if not directed:
                cap[v, u] = c
        return cls(cap, directed=directed)

    @classmethod
    def from_edge_csv(cls, path, directed: bool = False) -> "CapacityGraph":
        """Read the edge-list format: a ``#n=<N>`` header line, then
        ``u,v,capacity`` rows."""
        path = Path(path)
        lines = path.read_text().splitlines()
        if not lines or not lines[0].strip().startswith("#n="):
            raise ValueError(f"{path}:1: expected a '#n=<N>' header line")
        try:
            n = int(lines[0].strip()[3:])
        except ValueError:
            raise ValueError(f"{path}:1: malformed node count {lines[0].strip()!r}") from None
        if n < 1:
            raise ValueError(f"{path}:1: node count must be >= 1")
        edges = []
        seen = set()
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u,v,capacity', got {line!r}")
            try:
                u, v, c = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed edge {line!r}") from None
            if not 0 <= u < n or not 0 <= v < n:
                raise ValueError(f"{path}:{lineno}: node index out of range 0..{n - 1}")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self capacity is implicit; omit self loops")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate edge {key}")
            seen.add(key)
            edges.append((u, v, c))
        return cls.from_edges(n, edges, directed=directed)


@dataclass(frozen=True)
class CapacityMatrix:
    """All-pairs widest-path capacities; infinite on the diagonal."""

    values: np.ndarray
    directed: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def widest_path_matrix(g: CapacityGraph) -> CapacityMatrix:
    """All-pairs maximum bottleneck capacities by the incremental recursion.

    Mirror of the min-max-jump recursion with min and max swapped and the
    diagonal held at infinity; handles directed and undirected graphs.
    """
    n = g.n
    cap = g.cap
    out = np.zeros((n, n))
    np.fill_diagonal(out, np.inf)
    if n >= 2:
        out[0, 1] = cap[0, 1]
        out[1, 0] = cap[1, 0]
    scratch = np.empty((n, n)) if n > 2 else None
    for m in range(2, n):
        sub = out[:m, :m]
        buf = scratch[:m, :m]
        np.minimum(cap[m, :m, None], sub, out=buf)
        fwd = buf.max(axis=0)
        if g.directed:
            np.minimum(sub, cap[:m, m][None, :], out=buf)
            bwd = buf.max(axis=1)
        else:
            bwd = fwd
        np.minimum(bwd[:, None], fwd[None, :], out=buf)
        np.maximum(sub, buf, out=sub)
        out[m, :m] = fwd
        out[:m, m] = bwd
        out[m, m] = np.inf
    return CapacityMatrix(out, directed=g.directed)


def widest_path_by_max_spanning_tree(g: CapacityGraph) -> CapacityMatrix:
    """Undirected widest paths via a maximum spanning tree.

    Tree edges are processed from the largest capacity down; when the two
    components beside an edge merge, every cross pair receives that edge's
    capacity.  Equals :func:`widest_path_matrix` exactly.
    """
    if g.directed:
        raise ValueError("the spanning-tree route requires an undirected graph")
    n = g.n
    edges = _prim_dense(g.cap, maximize=True)
    out = np.zeros((n, n))
    np.fill_diagonal(out, np.inf)
    for w, a, b in _merge_steps(edges, n, descending=True):
        out[np.ix_(a, b)] = w
        out[np.ix_(b, a)] = w
    return CapacityMatrix(out, directed=False)
