"""Canonical certificates and isomorphism testing.

The certificate is the graph6 encoding of a canonically relabeled copy of
the graph, obtained by iterated colour refinement plus
individualization-and-refinement, taking the minimum over the search
tree.  Automorphisms discovered from equal leaf certificates prune the
top branching cell by orbits, which is what makes vertex-transitive
inputs (every Cayley graph) tractable.
"""
from __future__ import annotations

import hashlib

import numpy as np

from .errors import CanonBudgetExceeded, IsoUndecided
from .graphs import DenseGraph, from_edges
from .graph6 import encode_graph6

DEFAULT_CANON_BUDGET = 200_000
DEFAULT_ISO_CAP = 100_000


def _adjacency_matrix(g: DenseGraph) -> np.ndarray:
    v = g.vcount
    adj = np.zeros((v, v), dtype=np.int64)
    for x in range(v):
        row = g.rows[x]
        while row:
            low = row & -row
            adj[x, low.bit_length() - 1] = 1
            row ^= low
    return adj


def _refine(adj: np.ndarray, colors: np.ndarray) -> np.ndarray:
    """Stable colour refinement; new colour ids are ranks of the sorted
    (old colour, neighbour-colour counts) keys, so they are invariant
    under relabeling."""
    v = adj.shape[0]
    ncolors = int(colors.max()) + 1
    while True:
        onehot = np.zeros((v, ncolors), dtype=np.int64)
        onehot[np.arange(v), colors] = 1
        counts = adj @ onehot
        keys = np.concatenate([colors[:, None], counts], axis=1)
        _, inverse = np.unique(keys, axis=0, return_inverse=True)
        new_n = int(inverse.max()) + 1
        if new_n == ncolors:
            return inverse.astype(np.int64)
        colors = inverse.astype(np.int64)
        ncolors = new_n


def _cells(colors: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(colors, kind="stable")
    cells = []
    start = 0
    for i in range(1, len(order) + 1):
        if i == len(order) or colors[order[i]] != colors[order[start]]:
            cells.append(order[start:i])
            start = i
    return cells


def _target_cell(colors: np.ndarray) -> np.ndarray | None:
    """First smallest non-singleton cell (by size, then colour id)."""
    best = None
    for cell in _cells(colors):
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


def _relabel(g: DenseGraph, order: np.ndarray) -> DenseGraph:
    """order[pos] = original vertex placed at canonical position pos."""
    v = g.vcount
    pos_of = [0] * v
    for pos, x in enumerate(order):
        pos_of[int(x)] = pos
    rows = [0] * v
    for x in range(v):
        row = g.rows[x]
        new = 0
        while row:
            low = row & -row
            new |= 1 << pos_of[low.bit_length() - 1]
            row ^= low
        rows[pos_of[x]] = new
    return DenseGraph(v, tuple(rows))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


def canonical_form(g: DenseGraph,
                   node_budget: int = DEFAULT_CANON_BUDGET) -> bytes:
    """Relabeling-invariant certificate; equal certificates iff isomorphic.

    Raises CanonBudgetExceeded when the search tree outgrows the node
    budget; callers may fall back to pairwise isomorphism testing.
    """
    v = g.vcount
    if v == 0:
        return encode_graph6(g)
    adj = _adjacency_matrix(g)
    best: bytes | None = None
    leaf_orders: dict[bytes, np.ndarray] = {}
    found_auts: list[tuple[int, ...]] = []
    nodes = 0
    max_auts = 512
    max_leaf_orders = 4096

    def handle_leaf(colors: np.ndarray) -> None:
        nonlocal best
        order = np.argsort(colors)
        cert = encode_graph6(_relabel(g, order))
        if best is None or cert < best:
            best = cert
        prev = leaf_orders.get(cert)
        if prev is None:
            if len(leaf_orders) < max_leaf_orders:
                leaf_orders[cert] = order
        elif len(found_auts) < max_auts:
            # two labelings with equal certificates yield an automorphism
            rank_prev = np.empty(v, dtype=np.int64)
            rank_prev[prev] = np.arange(v)
            sigma = tuple(int(x) for x in order[rank_prev])
            if sigma != tuple(range(v)):
                found_auts.append(sigma)

    def orbit_hits(w: int, explored: set[int], path: tuple[int, ...]) -> bool:
        """Does some product of discovered automorphisms fixing the
        individualized path map w onto an explored branch?"""
        if not explored or not found_auts:
            return False
        usable = [a for a in found_auts
                  if all(a[x] == x for x in path)]
        if not usable:
            return False
        orbit = {w}
        frontier = [w]
        while frontier:
            x = frontier.pop()
            for a in usable:
                y = a[x]
                if y in explored:
                    return True
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        return False

    def search(colors: np.ndarray, path: tuple[int, ...]) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise CanonBudgetExceeded(
                f"canonical labeling exceeded {node_budget} nodes")
        colors = _refine(adj, colors)
        cell = _target_cell(colors)
        if cell is None:
            handle_leaf(colors)
            return
        explored: set[int] = set()
        for w in sorted(int(x) for x in cell):
            if orbit_hits(w, explored, path):
                continue
            child = colors * 2
            child[w] -= 1
            search(child, path + (w,))
            explored.add(w)

    search(np.zeros(v, dtype=np.int64), ())
    assert best is not None
    return best


def certificate_hex(cert: bytes) -> str:
    return cert.hex()


def invariant_key(g: DenseGraph) -> bytes:
    """Cheap relabeling-invariant fingerprint for bucketing before exact
    isomorphism checks: refinement colours plus the per-vertex profile of
    common-neighbour counts."""
    v = g.vcount
    if v == 0:
        return b"empty"
    adj = _adjacency_matrix(g)
    colors = _refine(adj, np.zeros(v, dtype=np.int64))
    sigs = []
    for x in range(v):
        prof_adj = []
        prof_non = []
        for y in range(v):
            if y == x:
                continue
            c = (g.rows[x] & g.rows[y]).bit_count()
            if g.adjacent(x, y):
                prof_adj.append((int(colors[y]), c))
            else:
                prof_non.append((int(colors[y]), c))
        sigs.append((int(colors[x]), tuple(sorted(prof_adj)),
                     tuple(sorted(prof_non))))
    payload = repr((v, sorted(sigs))).encode()
    return hashlib.sha256(payload).digest()


def _union_graph(g1: DenseGraph, g2: DenseGraph) -> DenseGraph:
    v = g1.vcount
    edges = list(g1.edges()) + [(u + v, w + v) for u, w in g2.edges()]
    return from_edges(2 * v, edges)


def are_isomorphic(g1: DenseGraph, g2: DenseGraph,
                   node_cap: int = DEFAULT_ISO_CAP) -> bool:
    """Exact isomorphism test by refinement-guided matching.

    Works on the disjoint union: vertices are individualized in pairs
    (one per side) and the union refined; any colour class that splits
    unevenly between the sides kills the branch.  Raises IsoUndecided
    when the node cap is hit.
    """
    if g1.vcount != g2.vcount:
        return False
    if sorted(g1.degree(x) for x in range(g1.vcount)) != \
       sorted(g2.degree(x) for x in range(g2.vcount)):
        return False
    if invariant_key(g1) != invariant_key(g2):
        return False
    v = g1.vcount
    if v == 0:
        return True
    union = _union_graph(g1, g2)
    adj = _adjacency_matrix(union)
    side = np.array([0] * v + [1] * v)
    nodes = 0

    def balanced(colors: np.ndarray) -> bool:
        ncolors = int(colors.max()) + 1
        left = np.bincount(colors[:v], minlength=ncolors)
        right = np.bincount(colors[v:], minlength=ncolors)
        return bool(np.array_equal(left, right))

    def extract_if_discrete_pairs(colors: np.ndarray):
        """If every colour class is one vertex per side, return the map."""
        ncolors = int(colors.max()) + 1
        if ncolors != v:
            return None
        mapping = [-1] * v
        buckets: dict[int, list[int]] = {}
        for x, c in enumerate(colors):
            buckets.setdefault(int(c), []).append(x)
        for members in buckets.values():
            if len(members) != 2:
                return None
            a, b = members
            if side[a] == side[b]:
                return None
            if side[a] == 1:
                a, b = b, a
            mapping[a] = b - v
        return mapping

    def verify(mapping) -> bool:
        for x in range(v):
            for y in range(x + 1, v):
                if g1.adjacent(x, y) != g2.adjacent(mapping[x], mapping[y]):
                    return False
        return True

    def search(colors: np.ndarray) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise IsoUndecided(f"isomorphism search exceeded {node_cap} nodes")
        colors = _refine(adj, colors)
        if not balanced(colors):
            return False
        mapping = extract_if_discrete_pairs(colors)
        if mapping is not None:
            return verify(mapping)
        # smallest colour class with more than one vertex per side
        target = None
        for cell in _cells(colors):
            if len(cell) > 2 and (target is None or len(cell) < len(target)):
                target = cell
        if target is None:
            return False
        lefts = sorted(int(x) for x in target if side[x] == 0)
        rights = sorted(int(x) for x in target if side[x] == 1)
        u = lefts[0]
        for w in rights:
            child = colors * 2
            child[u] -= 1
            child[w] -= 1
            if search(child):
                return True
        return False

    return search(np.zeros(2 * v, dtype=np.int64))
