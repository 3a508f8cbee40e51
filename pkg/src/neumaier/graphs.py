"""Cayley graph materialization and graph-theoretic predicates.

Adjacency is stored as one Python-int bitset per vertex, so common
neighbour counting is a single AND + popcount; this is the inner loop of
verification and enumeration and the reason for the 256-vertex ceiling.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .errors import (HNotCliqueError, IdentityInConnectionSet, NotACliqueError,
                     NotConnectedError, NotDistanceRegularError,
                     NotEdgeRegularError, NotInverseClosed,
                     NotRegularCliqueError, NotRegularError, NotSrgError)
from .groups import FiniteGroup, Subgroup, right_cosets

MAX_VERTICES = 256


@dataclass(frozen=True)
class DenseGraph:
    """Simple undirected graph as bitset adjacency rows."""

    vcount: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.vcount > MAX_VERTICES:
            raise ValueError(f"graphs beyond {MAX_VERTICES} vertices are unsupported")
        full = (1 << self.vcount) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {v} has bits outside the vertex range")
            if (row >> v) & 1:
                raise ValueError(f"vertex {v} is self-adjacent")
        for v in range(self.vcount):
            for u in _bits(self.rows[v]):
                if not (self.rows[u] >> v) & 1:
                    raise ValueError(f"adjacency not symmetric at ({v},{u})")

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degree(v) for v in range(self.vcount)) // 2

    def common_neighbours(self, u: int, v: int) -> int:
        return (self.rows[u] & self.rows[v]).bit_count()

    def is_complete(self) -> bool:
        full = (1 << self.vcount) - 1
        return all(self.rows[v] == full ^ (1 << v) for v in range(self.vcount))

    def edges(self):
        for u in range(self.vcount):
            row = self.rows[u] >> (u + 1)
            v = u + 1
            while row:
                if row & 1:
                    yield (u, v)
                row >>= 1
                v += 1

    def to_adjacency_json(self) -> str:
        return json.dumps({
            "vcount": self.vcount,
            "adjacency": [sorted(_bits(row)) for row in self.rows],
        })

    @staticmethod
    def from_adjacency_json(text: str) -> "DenseGraph":
        data = json.loads(text)
        return from_edges(int(data["vcount"]),
                          [(u, v) for u, nbrs in enumerate(data["adjacency"])
                           for v in nbrs if u < v])

    def to_edge_list(self) -> str:
        lines = [f"{self.vcount}"]
        lines += [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_edges(vcount: int, edges) -> DenseGraph:
    rows = [0] * vcount
    for u, v in edges:
        if u == v:
            raise ValueError("self loop")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return DenseGraph(vcount, tuple(rows))


@dataclass(frozen=True)
class CayleyGraph:
    """A group with an identity-free inverse-closed connection set."""

    group: FiniteGroup
    connection: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "connection", frozenset(self.connection))

    def validate(self) -> None:
        if 0 in self.connection:
            raise IdentityInConnectionSet("connection set contains the identity")
        inv = self.group.inv
        for x in self.connection:
            if inv[x] not in self.connection:
                raise NotInverseClosed(
                    f"element {x} is in the connection set but {inv[x]} is not",
                    witness=x)

    @cached_property
    def dense(self) -> DenseGraph:
        return materialize(self)


def materialize(c: CayleyGraph) -> DenseGraph:
    """Vertex g is adjacent to h iff h*g^-1 is in S, i.e. h in S*g."""
    c.validate()
    g = c.group
    rows = [0] * g.order
    conn = sorted(c.connection)
    mul = g.mul
    for x in range(g.order):
        row = 0
        for s in conn:
            row |= 1 << mul[s][x]
        rows[x] = row
    return DenseGraph(g.order, tuple(rows))


@dataclass(frozen=True)
class EdgeRegularParams:
    v: int
    k: int
    lam: int

    def __post_init__(self):
        if not (self.lam <= self.k - 1 <= self.v - 2):
            raise ValueError(f"infeasible edge-regular parameters {self}")


@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def __post_init__(self):
        if self.k * (self.k - self.lam - 1) != (self.v - self.k - 1) * self.mu:
            raise ValueError(f"SRG identity fails for {self}")

    def as_tuple(self):
        return (self.v, self.k, self.lam, self.mu)


@dataclass(frozen=True)
class NeumaierParams:
    """(v, k, lambda, m, s): order, degree, triangles per edge, nexus,
    clique size.  The degree and triangle count are determined by
    (n, s, m) for a coset spread with n = v/s."""

    v: int
    k: int
    lam: int
    m: int
    s: int

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("clique size must be at least 2")
        if self.v % self.s:
            raise ValueError("clique size must divide the order")
        n = self.v // self.s
        if self.k != self.s - 1 + (n - 1) * self.m:
            raise ValueError(f"degree identity fails for {self}")
        num = (n - 1) * self.m * (self.m - 1)
        if num % (self.s - 1) or self.lam != self.s - 2 + num // (self.s - 1):
            raise ValueError(f"triangle identity fails for {self}")

    def as_tuple(self):
        return (self.v, self.k, self.lam, self.m, self.s)


@dataclass(frozen=True)
class IntersectionArray:
    """Distance-regularity parameters {b_0,...,b_{d-1}; c_1,...,c_d}."""

    bs: tuple[int, ...]
    cs: tuple[int, ...]

    def __post_init__(self):
        if len(self.bs) != len(self.cs):
            raise ValueError("b and c sequences must have equal length")
        if self.cs and self.cs[0] != 1:
            raise ValueError("c_1 must be 1")

    @property
    def diameter(self) -> int:
        return len(self.bs)

    def __str__(self) -> str:
        return ("{" + ",".join(map(str, self.bs)) + ";"
                + ",".join(map(str, self.cs)) + "}")


def edge_regular(g: DenseGraph) -> EdgeRegularParams:
    """Regular with every edge in the same number of triangles."""
    if g.vcount == 0:
        raise NotRegularError("empty graph")
    k = g.degree(0)
    for v in range(1, g.vcount):
        if g.degree(v) != k:
            raise NotRegularError(f"degrees {k} and {g.degree(v)} both occur")
    lam = None
    for u, v in g.edges():
        c = g.common_neighbours(u, v)
        if lam is None:
            lam = c
        elif c != lam:
            raise NotEdgeRegularError(
                f"edges carry both {lam} and {c} triangles", witness=(u, v))
    if lam is None:
        raise NotEdgeRegularError("graph has no edges")
    return EdgeRegularParams(g.vcount, k, lam)


def strongly_regular(g: DenseGraph) -> SrgParams:
    er = edge_regular(g)
    mu = None
    for u in range(g.vcount):
        non = ~g.rows[u] & ((1 << g.vcount) - 1) & ~(1 << u)
        for v in _bits(non >> (u + 1)):
            w = v + u + 1
            c = g.common_neighbours(u, w)
            if mu is None:
                mu = c
            elif c != mu:
                raise NotSrgError(
                    f"non-adjacent pairs carry both {mu} and {c} common "
                    f"neighbours", witness=(u, w))
    if mu is None:
        raise NotSrgError("complete graph has no non-adjacent pairs")
    return SrgParams(er.v, er.k, er.lam, mu)


def clique_nexus(g: DenseGraph, clique) -> int:
    """The common number of neighbours outside vertices have in the clique."""
    cl = sorted(set(clique))
    if not cl:
        raise NotACliqueError("empty vertex set")
    mask = 0
    for v in cl:
        mask |= 1 << v
    for v in cl:
        if g.rows[v] & mask != mask ^ (1 << v):
            missing = _bits((mask ^ (1 << v)) & ~g.rows[v])
            raise NotACliqueError(
                f"vertices {v} and {next(missing)} are not adjacent",
                witness=v)
    m = None
    for v in range(g.vcount):
        if (mask >> v) & 1:
            continue
        c = (g.rows[v] & mask).bit_count()
        if m is None:
            m = c
        elif c != m:
            raise NotRegularCliqueError(
                f"outside vertices have both {m} and {c} neighbours in the "
                f"clique", witness=v, count=c)
    if not m:
        raise NotRegularCliqueError(
            "no outside vertex, or outside vertices have no neighbours in "
            "the clique", count=m)
    return m


def coset_spread_nexus(c: CayleyGraph, h: Subgroup) -> int:
    """Verify every coset of H is an m-regular clique with a common m.

    Two routes are computed and compared: the direct check of H itself
    (sufficient by vertex-transitivity) and the explicit check of every
    coset.
    """
    if len(h) == c.group.order:
        raise HNotCliqueError("subgroup equals the whole group; the graph "
                              "would have to be complete")
    for x in h.members:
        if x != 0 and x not in c.connection:
            raise HNotCliqueError(
                f"subgroup element {x} is missing from the connection set")
    g = c.dense
    m_direct = clique_nexus(g, h.members)
    cosets = right_cosets(c.group, h)
    ms = {clique_nexus(g, cs) for cs in cosets.cosets}
    if ms != {m_direct}:
        raise NotRegularCliqueError(
            f"cosets disagree on the nexus: {sorted(ms)} vs {m_direct}")
    return m_direct


def distance_partition(g: DenseGraph, root: int) -> list[int]:
    """BFS distances from root; -1 for unreachable vertices."""
    dist = [-1] * g.vcount
    dist[root] = 0
    frontier = 1 << root
    seen = frontier
    d = 0
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.rows[v]
        nxt &= ~seen
        d += 1
        for v in _bits(nxt):
            dist[v] = d
        seen |= nxt
        frontier = nxt
    return dist


@dataclass(frozen=True)
class DistanceRegularReport:
    array: IntersectionArray
    antipodal: bool
    antipodal_classes: tuple[tuple[int, ...], ...] | None


def distance_regular(g: DenseGraph) -> DistanceRegularReport:
    """Check that the (b_i, c_i) profile of the BFS distance partition is
    the same from every vertex, and report antipodality of the
    largest-distance relation."""
    if g.vcount == 0:
        raise NotConnectedError("empty graph")
    ref_dist = distance_partition(g, 0)
    if min(ref_dist) < 0:
        raise NotConnectedError("graph is not connected")
    diameter = max(ref_dist)
    bs: list[int | None] = [None] * (diameter + 1)
    cs: list[int | None] = [None] * (diameter + 1)
    all_dists = []
    for root in range(g.vcount):
        dist = distance_partition(g, root) if root else ref_dist
        if min(dist) < 0:
            raise NotConnectedError("graph is not connected")
        if max(dist) != diameter:
            raise NotDistanceRegularError(
                f"vertex {root} has eccentricity {max(dist)} != {diameter}",
                witness=root)
        all_dists.append(dist)
        sphere = [0] * (diameter + 2)
        for v, d in enumerate(dist):
            sphere[d] |= 1 << v
        for v, d in enumerate(dist):
            b = (g.rows[v] & sphere[d + 1]).bit_count()
            c = (g.rows[v] & sphere[d - 1]).bit_count() if d else 0
            if bs[d] is None:
                bs[d], cs[d] = b, c
            elif (bs[d], cs[d]) != (b, c):
                raise NotDistanceRegularError(
                    f"vertex {v} at distance {d} from {root} breaks the "
                    f"profile", witness=(root, v))
    array = IntersectionArray(tuple(bs[:diameter]), tuple(cs[1:diameter + 1]))
    classes = _antipodal_classes(g, all_dists, diameter)
    return DistanceRegularReport(array, classes is not None, classes)


def _antipodal_classes(g, all_dists, diameter):
    """Classes of the 'distance 0 or diameter' relation, or None if it is
    not an equivalence."""
    if diameter <= 1:
        return None
    classes = []
    assigned = [None] * g.vcount
    for u in range(g.vcount):
        if assigned[u] is not None:
            continue
        cls = tuple(sorted([u] + [v for v in range(g.vcount)
                                  if all_dists[u][v] == diameter]))
        for v in cls:
            if assigned[v] is not None:
                return None
            assigned[v] = len(classes)
        classes.append(cls)
    # transitivity: members of a class must agree on the whole class
    for cls in classes:
        for u in cls:
            for v in cls:
                if u != v and all_dists[u][v] != diameter:
                    return None
    return tuple(classes)


@dataclass(frozen=True)
class NeumaierCheckReport:
    """Composed verdict: edge-regularity + coset-clique spread +
    non-completeness, with strictness = not strongly regular."""

    edge_params: EdgeRegularParams | None
    nexus: int | None
    complete: bool
    srg: SrgParams | None
    params: NeumaierParams | None
    failures: tuple[tuple[str, str], ...]

    @property
    def neumaier(self) -> bool:
        return self.params is not None

    @property
    def strictly(self) -> bool:
        return self.neumaier and self.srg is None


def strictly_neumaier_check(c: CayleyGraph, h: Subgroup) -> NeumaierCheckReport:
    """Full graph-level check that Cay(G, S) is a Neumaier graph whose
    clique spread is given by the cosets of H, and whether it is strict."""
    g = c.dense
    failures: list[tuple[str, str]] = []
    complete = g.is_complete()
    if complete:
        failures.append(("complete", "graph is complete"))
    edge_params = None
    try:
        edge_params = edge_regular(g)
    except (NotRegularError, NotEdgeRegularError) as e:
        failures.append(("edge-regular", str(e)))
    nexus = None
    try:
        nexus = coset_spread_nexus(c, h)
    except (HNotCliqueError, NotACliqueError, NotRegularCliqueError) as e:
        failures.append(("coset-spread", str(e)))
    srg = None
    try:
        srg = strongly_regular(g)
    except (NotRegularError, NotEdgeRegularError, NotSrgError):
        srg = None
    params = None
    if edge_params and nexus and not complete:
        params = NeumaierParams(edge_params.v, edge_params.k, edge_params.lam,
                                nexus, len(h))
    return NeumaierCheckReport(edge_params, nexus, complete, srg, params,
                               tuple(failures))
