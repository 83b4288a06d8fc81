"""O(n^2) exact min-max-jump computation through a minimum spanning tree.

The path between any two nodes of a minimum spanning tree is a minimax path,
so the all-pairs matrix can be filled by walking the tree's edges from small
to large with a disjoint-set structure: when the components on either side of
an edge merge, every cross pair receives that edge's weight, and each cell is
written exactly once.  This is order-equivalent to removing tree edges from
large to small and filling the cross pairs of the two split subtrees.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mmj.base_metrics import BaseDistanceMatrix
from mmj.exact import MmjMatrix


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree over n nodes: exactly n-1 weighted edges."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.edges) != max(self.n - 1, 0):
            raise ValueError(f"a spanning tree over {self.n} nodes needs {self.n - 1} edges")
        adj: dict[int, list[tuple[int, float]]] = {i: [] for i in range(self.n)}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        object.__setattr__(self, "_adj", adj)


def _prim_dense(vals: np.ndarray, maximize: bool = False) -> list[tuple[int, int, float]]:
    # Dense O(n^2) Prim without a priority queue; the diagonal is never read
    # for out-of-tree nodes, so capacity-style inf diagonals are safe.
    # Ties on weight break by the smallest (min endpoint, max endpoint) pair.
    n = vals.shape[0]
    if n <= 1:
        return []
    sign = -1.0 if maximize else 1.0
    key = sign * vals[0].astype(float)
    parent = np.zeros(n, dtype=int)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    edges: list[tuple[int, int, float]] = []
    for _ in range(n - 1):
        masked = np.where(in_tree, np.inf, key)
        kmin = masked.min()
        cands = np.flatnonzero(masked == kmin)
        if len(cands) == 1:
            v = int(cands[0])
        else:
            v = min(
                (int(c) for c in cands),
                key=lambda c: (min(parent[c], c), max(parent[c], c)),
            )
        u = int(parent[v])
        edges.append((min(u, v), max(u, v), float(vals[u, v])))
        in_tree[v] = True
        cand_key = sign * vals[v]
        better = (cand_key < key) & ~in_tree
        key[better] = cand_key[better]
        parent[better] = v
    return edges


def build_mst(base: BaseDistanceMatrix) -> SpanningTree:
    """Minimum spanning tree of the complete graph on the base distances."""
    if base.directed:
        raise ValueError("spanning trees require an undirected base matrix")
    return SpanningTree(base.n, tuple(_prim_dense(base.values)))


def _merge_steps(edges, n: int, descending: bool = False):
    """Yield (weight, members_a, members_b) per union of tree components.

    Edges are processed in ascending weight order (descending for the widest
    path mirror); summed over all merges the cross products cover each
    unordered pair exactly once.
    """
    order = sorted(edges, key=lambda e: (-e[2], e[0], e[1]) if descending else (e[2], e[0], e[1]))
    parent = list(range(n))
    members: list[list[int] | None] = [[i] for i in range(n)]

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, w in order:
        ra, rb = find(u), find(v)
        a, b = members[ra], members[rb]
        yield w, a, b
        if len(a) < len(b):
            ra, rb, a, b = rb, ra, b, a
        parent[rb] = ra
        a.extend(b)
        members[rb] = None


def mmj_by_mst(base: BaseDistanceMatrix) -> MmjMatrix:
    """O(n^2) exact engine; equals the recursion engine entrywise."""
    tree = build_mst(base)
    out = np.zeros((base.n, base.n))
    for w, a, b in _merge_steps(tree.edges, base.n):
        out[np.ix_(a, b)] = w
        out[np.ix_(b, a)] = w
    return MmjMatrix(out, directed=False)


def mmj_pair_via_mst(tree: SpanningTree, i: int, j: int) -> float:
    """Maximum edge weight on the unique tree path between two nodes."""
    if not (0 <= i < tree.n and 0 <= j < tree.n):
        raise ValueError(f"indices ({i}, {j}) out of range for {tree.n} nodes")
    if i == j:
        return 0.0
    # Depth-first walk carrying the running max; the tree is tiny enough
    # that no parent precomputation is warranted.
    stack = [(i, -1, 0.0)]
    while stack:
        node, prev, cur = stack.pop()
        for nxt, w in tree._adj[node]:
            if nxt == prev:
                continue
            m = cur if cur >= w else w
            if nxt == j:
                return float(m)
            stack.append((nxt, node, m))
    raise ValueError(f"no tree path between {i} and {j}")
