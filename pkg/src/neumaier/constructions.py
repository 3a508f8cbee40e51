"""Executable builders and checkers for Neumaier Cayley graphs.

Provides the subgroup-coset criterion (`theorem1_check`), the parameter
formulas (`params_from_corollary`), the two difference-set constructions
(`construction1`, `construction2`), the partial-spread strongly regular
host graph, and the assembled family instances (`theorem2_graph`).

Builders re-verify everything they claim through the graph predicates
instead of trusting the formulas, so each run doubles as an executable
check at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (BadRdsParams, InvalidInput, NotACliqueError,
                     NotEdgeRegularError, NotRegularCliqueError,
                     NotRegularError, NotSrgError, PreconditionViolated,
                     WrongUOrder)
from .gf2 import BooleanFunction, SpreadFamily, maiorana_mcfarland, spread_family
from .graphs import (CayleyGraph, DenseGraph, EdgeRegularParams,
                     NeumaierCheckReport, NeumaierParams, SrgParams,
                     clique_nexus, edge_regular, materialize,
                     strictly_neumaier_check, strongly_regular)
from .groups import (FiniteGroup, Subgroup, direct_product, inverse_set,
                     make_group, right_cosets, subgroup_generated)
from .rds import RdsParams, RelativeDifferenceSet, bent_rds, verify_rds


# ---------------------------------------------------------------------------
# the subgroup-coset criterion


@dataclass(frozen=True)
class Theorem1Report:
    """Outcome of the coset-spread criterion for S = H# union T.

    All three conditions pass (with a consistent lambda and 1 <= m < s)
    exactly when ``params`` is present.
    """

    v: int
    s: int
    n: int
    m: int | None
    cond1_ok: bool
    cond1_witness: int | None          # coset representative
    cond2_ok: bool
    cond2_witness: int | None          # element h of H#
    cond3_ok: bool
    cond3_witness: int | None          # element g of T
    lam: int | None
    lam_consistent: bool
    complete: bool
    params: NeumaierParams | None

    @property
    def ok(self) -> bool:
        return self.params is not None


def _mask_of(xs) -> int:
    mask = 0
    for x in xs:
        mask |= 1 << x
    return mask


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def theorem1_check(g: FiniteGroup, h: Subgroup, s,
                   cross_validate: bool = False) -> Theorem1Report:
    """Set-level test that Cay(G, S) is a Neumaier graph whose regular
    cliques are the cosets of H.

    With T = S \\ H#, the conditions are: (1) |T n Hg| is one constant m
    for every non-H coset, (2) |Th n T| is constant over h in H#, and
    (3) |Tg n T| is constant over g in T, with both constants resolving
    to the same lambda.  m = s means the graph is complete and is
    reported as a failure (Neumaier graphs are non-complete).
    """
    if h.parent is not g and h.parent != g:
        raise PreconditionViolated("subgroup does not belong to the group")
    if len(h) < 2:
        raise PreconditionViolated("subgroup must have at least 2 elements")
    if len(h) == g.order:
        raise PreconditionViolated("subgroup must be proper")
    sset = frozenset(s)
    if 0 in sset:
        raise PreconditionViolated("identity in connection set")
    bad = [x for x in sset if g.inv[x] not in sset]
    if bad:
        raise PreconditionViolated("connection set is not inverse-closed",
                                   witness=min(bad))
    missing = [x for x in h.members if x != 0 and x not in sset]
    if missing:
        raise PreconditionViolated(
            "subgroup nonidentity elements must lie in the connection set",
            witness=min(missing))

    cosets = right_cosets(g, h)
    n = len(cosets)
    v, size_s = g.order, len(h)
    t_mask = _mask_of(sset) & ~_mask_of(h.members)
    mul = g.mul

    def right_mul(mask: int, y: int) -> int:
        out = 0
        for x in _bits(mask):
            out |= 1 << mul[x][y]
        return out

    # condition (1)
    m = None
    cond1_ok, cond1_witness = True, None
    for rep, cs in zip(cosets.reps[1:], cosets.cosets[1:]):
        c = (t_mask & _mask_of(cs)).bit_count()
        if m is None:
            m = c
        elif c != m:
            cond1_ok, cond1_witness = False, rep
            break
    if m == 0:
        cond1_ok, cond1_witness = False, cosets.reps[1]
    complete = cond1_ok and m == size_s

    # condition (2): |Th n T| constant over h in H#
    cond2_ok, cond2_witness, c2 = True, None, None
    for hh in h.members[1:]:
        c = (right_mul(t_mask, hh) & t_mask).bit_count()
        if c2 is None:
            c2 = c
        elif c != c2:
            cond2_ok, cond2_witness = False, hh
            break

    # condition (3): |Tg n T| constant over g in T
    cond3_ok, cond3_witness, c3 = True, None, None
    for t in _bits(t_mask):
        c = (right_mul(t_mask, t) & t_mask).bit_count()
        if c3 is None:
            c3 = c
        elif c != c3:
            cond3_ok, cond3_witness = False, t
            break
    if t_mask == 0:
        cond3_ok = False

    lam = None
    lam_consistent = False
    if cond2_ok and cond3_ok and cond1_ok and c2 is not None and c3 is not None:
        lam2 = c2 + size_s - 2
        lam3 = c3 + 2 * m - 2
        lam_consistent = lam2 == lam3
        if lam_consistent:
            lam = lam2

    params = None
    if (cond1_ok and cond2_ok and cond3_ok and lam_consistent
            and not complete and m and m < size_s):
        params = NeumaierParams(v, len(sset), lam, m, size_s)

    report = Theorem1Report(v, size_s, n, m, cond1_ok, cond1_witness,
                            cond2_ok, cond2_witness, cond3_ok, cond3_witness,
                            lam, lam_consistent, complete, params)
    if cross_validate:
        check = strictly_neumaier_check(CayleyGraph(g, sset), h)
        if check.neumaier != report.ok:
            raise AssertionError(
                "set-level and graph-level verdicts disagree "
                f"({report.ok} vs {check.neumaier})")
        if report.ok and check.params != report.params:
            raise AssertionError("parameter tuples disagree between routes")
    return report


@dataclass(frozen=True)
class CorollaryParams:
    feasible: bool
    v: int | None = None
    k: int | None = None
    lam: int | None = None
    reason: str = ""


def params_from_corollary(n: int, s: int, m: int) -> CorollaryParams:
    """Parameters (v, k, lambda) of a coset-spread Neumaier graph from
    (n, s, m): v = n*s, k = s-1+(n-1)*m, lambda = s-2+(n-1)m(m-1)/(s-1).

    Infeasible when the division is not exact or lambda >= k-1 (the
    latter includes the m = s complete-graph boundary).
    """
    if n < 2 or s < 2 or not (1 <= m <= s):
        raise ValueError(f"need n>=2, s>=2, 1<=m<=s; got {(n, s, m)}")
    v = n * s
    k = s - 1 + (n - 1) * m
    num = (n - 1) * m * (m - 1)
    if num % (s - 1):
        return CorollaryParams(False, reason="lambda is not an integer")
    lam = s - 2 + num // (s - 1)
    if lam >= k - 1:
        return CorollaryParams(
            False, v=v, k=k, lam=lam,
            reason="lambda >= k-1 forces a complete graph")
    return CorollaryParams(True, v=v, k=k, lam=lam)


# ---------------------------------------------------------------------------
# construction 1: inflate a reversible semiregular difference set


@dataclass(frozen=True)
class Construction1Result:
    graph: CayleyGraph
    clique: Subgroup
    expected: NeumaierParams
    check: NeumaierCheckReport
    strict: bool


def construction1(t: RelativeDifferenceSet, u: FiniteGroup,
                  max_order: int = 1024) -> Construction1Result:
    """Neumaier graph over G x U from a reversible semiregular difference
    set with parameters (n*lam, n, n*lam, lam), n dividing lam, |U| = lam/n.

    The connection set is T# together with the nonidentity part of
    H = N x U; the result is a 1-regular-clique spread with parameters
    (n*lam^2, (n+1)*lam - 2, lam - 2, 1, lam), strongly regular exactly
    when lam = n.
    """
    flags = t.flags
    p = t.params
    if not (flags.reversible and flags.semiregular):
        raise BadRdsParams("construction needs a reversible semiregular set")
    if p.lam % p.n:
        raise BadRdsParams(f"|N| = {p.n} must divide lambda = {p.lam}")
    if u.order != p.lam // p.n:
        raise WrongUOrder(f"|U| must be {p.lam // p.n}, got {u.order}")

    gu = direct_product(t.group, u, max_order=max_order)
    nu = u.order
    t_embedded = {x * nu for x in t.members}
    h_members = tuple(sorted(x * nu + j for x in t.forbidden.members
                             for j in range(nu)))
    clique = Subgroup(gu, h_members)
    connection = frozenset((t_embedded | set(h_members)) - {0})
    graph = CayleyGraph(gu, connection)

    lam, n = p.lam, p.n
    expected = NeumaierParams(n * lam * lam, (n + 1) * lam - 2, lam - 2, 1, lam)
    check = strictly_neumaier_check(graph, clique)
    if not check.neumaier or check.params != expected:
        raise AssertionError(
            f"construction failed verification: {check.failures}, "
            f"{check.params} vs {expected}")
    strict = check.srg is None
    if strict != (lam != n):
        raise AssertionError("strictness does not match the lam = n boundary")
    return Construction1Result(graph, clique, expected, check, strict)


# ---------------------------------------------------------------------------
# partial-spread strongly regular host graph


@dataclass(frozen=True)
class PartialSpreadResult:
    group: FiniteGroup
    connection: frozenset[int]
    spread: SpreadFamily
    srg: SrgParams
    clique_nexus: int


def partial_spread_srg(n: int,
                       spread: SpreadFamily | None = None) -> PartialSpreadResult:
    """Union of l = 2^(n-1)+1 spread lines of C2^(2n) as a strongly
    regular graph with parameters
    (2^2n, (2^n-1)(2^(n-1)+1), 2(2^(n-1)-1)(2^(n-2)+1), 2^(n-1)(2^(n-1)+1));
    every line is a 2^(n-1)-regular clique and v0 = 4(k0 - lam0 - 1).
    """
    if n < 2 or n % 2:
        raise InvalidInput("n", f"n must be even and >= 2, got {n}")
    l = (1 << (n - 1)) + 1
    fam = spread if spread is not None else spread_family(n, l)
    if len(fam.lines) != l:
        raise InvalidInput("spread", f"need exactly {l} lines")
    connection = frozenset(x for line in fam.lines for x in line if x != 0)
    if connection & fam.baseline:
        raise InvalidInput("spread", "lines meet the baseline outside e")
    graph = CayleyGraph(fam.group, connection)
    dense = graph.dense
    srg = strongly_regular(dense)
    q = 1 << n
    expected = SrgParams(q * q, (q - 1) * (q // 2 + 1),
                         2 * (q // 2 - 1) * (q // 4 + 1),
                         (q // 2) * (q // 2 + 1))
    if srg != expected:
        raise AssertionError(f"unexpected host parameters {srg} vs {expected}")
    nexus = None
    for line in fam.lines:
        mm = clique_nexus(dense, line)
        if nexus is None:
            nexus = mm
        elif mm != nexus:
            raise AssertionError("spread lines disagree on the nexus")
    if nexus != q // 2:
        raise AssertionError(f"line nexus {nexus}, expected {q // 2}")
    if srg.v != 4 * (srg.k - srg.lam - 1):
        raise AssertionError("size-balance identity v0 = 4(k0-lam0-1) fails")
    return PartialSpreadResult(fam.group, connection, fam, srg, nexus)


# ---------------------------------------------------------------------------
# construction 2: doubling a partial-spread host


@dataclass(frozen=True)
class Construction2Input:
    """Ingredients for the doubled construction.

    ``a0_embed`` maps the abstract index-2 factor A0 into A; ``s0`` is a
    connection set on direct_product(a0, h0) avoiding the A0 axis; ``t``
    is a reversible transversal difference set in direct_product(h0, C2)
    with forbidden subgroup {0, 1} and parameters (m0, 2, m0, m0/2).
    """

    a: FiniteGroup
    a0: FiniteGroup
    a0_embed: tuple[int, ...]
    h0: FiniteGroup
    s0: frozenset[int]
    t: frozenset[int]


@dataclass(frozen=True)
class Construction2Result:
    graph: CayleyGraph
    clique: Subgroup
    base_graph: DenseGraph
    base_edge: EdgeRegularParams | None
    base_srg: SrgParams | None
    base_clique_nexus: int | None
    balance_holds: bool | None            # v0 == 4*(k0 - lam0 - 1)
    clique_regular: int | None            # nexus of H in the new graph
    check: NeumaierCheckReport
    expected: NeumaierParams | None
    strict: bool


def construction2(inp: Construction2Input) -> Construction2Result:
    """Quadruple a host graph into a coset-spread Neumaier graph.

    G = A x H0 x C2 with connection set (A \\ A0)T  u  S0*C  u  {c}; the
    clique is H = H0 x C2.  The result is edge-regular exactly when the
    host satisfies v0 = 4(k0 - lam0 - 1) (reported as ``balance_holds``)
    and is never strongly regular when the host is.
    """
    a, a0, h0 = inp.a, inp.a0, inp.h0
    if not a.is_abelian:
        raise InvalidInput("a-abelian")
    if not a0.is_abelian or a0.order < 2:
        raise InvalidInput("a0-abelian-nontrivial")
    if not h0.is_abelian or h0.order < 2:
        raise InvalidInput("h0-abelian-nontrivial")
    m0 = h0.order
    if m0 % 2:
        raise InvalidInput("h0-order-even", f"|H0| = {m0} must be even")
    embed = inp.a0_embed
    if len(embed) != a0.order or len(set(embed)) != a0.order:
        raise InvalidInput("a0-embed", "embedding is not injective")
    if embed[0] != 0:
        raise InvalidInput("a0-embed", "embedding must fix the identity")
    for x in range(a0.order):
        for y in range(a0.order):
            if embed[a0.mul[x][y]] != a.mul[embed[x]][embed[y]]:
                raise InvalidInput("a0-embed", "embedding is not a homomorphism")
    if 2 * a0.order != a.order:
        raise InvalidInput("a0-index", "A0 must have index 2 in A")

    g0 = direct_product(a0, h0)
    a0_axis = frozenset(x * h0.order for x in range(a0.order))
    if any(u < 0 or u >= g0.order for u in inp.s0):
        raise InvalidInput("s0-range")
    if inp.s0 & a0_axis:
        raise InvalidInput("s0-avoids-a0", "S0 must avoid the A0 axis")
    if inp.s0 != inverse_set(g0, inp.s0):
        raise InvalidInput("s0-inverse-closed")

    c2 = make_group("C2")
    hgrp = direct_product(h0, c2)
    forbidden = subgroup_generated(hgrp, [1])
    try:
        tparams = verify_rds(hgrp, forbidden, inp.t)
    except Exception as e:
        raise InvalidInput("t-not-rds", str(e)) from e
    if tparams != RdsParams(m0, 2, m0, m0 // 2):
        raise InvalidInput("t-params",
                           f"need ({m0},2,{m0},{m0 // 2}), got {tparams.as_tuple()}")
    if inp.t != inverse_set(hgrp, inp.t):
        raise InvalidInput("t-reversible")

    # host graph over A0 x H0
    base = materialize(CayleyGraph(g0, inp.s0))
    v0 = g0.order
    base_edge = None
    try:
        base_edge = edge_regular(base)
    except (NotRegularError, NotEdgeRegularError):
        base_edge = None
    base_srg = None
    try:
        base_srg = strongly_regular(base)
    except (NotRegularError, NotEdgeRegularError, NotSrgError):
        base_srg = None
    base_nexus = None
    try:
        base_nexus = clique_nexus(base, range(h0.order))
    except (NotACliqueError, NotRegularCliqueError):
        base_nexus = None
    balance = None
    if base_edge is not None:
        balance = v0 == 4 * (base_edge.k - base_edge.lam - 1)

    # assembled group G = A x (H0 x C2)
    big = direct_product(a, hgrp)
    nh = hgrp.order
    a0_image = frozenset(embed)
    connection: set[int] = set()
    for ai in range(a.order):
        if ai in a0_image:
            continue
        for t in inp.t:
            connection.add(ai * nh + t)
    for u in inp.s0:
        x, y = divmod(u, h0.order)
        for eps in (0, 1):
            connection.add(embed[x] * nh + y * 2 + eps)
    connection.add(1)  # c: the nontrivial element of the C2 factor
    clique = Subgroup(big, tuple(range(nh)))
    graph = CayleyGraph(big, frozenset(connection))

    dense = graph.dense
    clique_reg = None
    try:
        clique_reg = clique_nexus(dense, clique.members)
    except (NotACliqueError, NotRegularCliqueError):
        clique_reg = None

    check = strictly_neumaier_check(graph, clique)
    if base_edge is not None:
        if balance != (check.edge_params is not None):
            raise AssertionError(
                "edge-regularity must hold exactly when v0 = 4(k0-lam0-1)")
    expected = None
    if base_edge is not None and balance and base_nexus == m0 // 2:
        expected = NeumaierParams(4 * v0, v0 + 2 * base_edge.k + 1,
                                  2 * base_edge.k, m0, 2 * m0)
        if check.params != expected:
            raise AssertionError(
                f"parameters {check.params} do not match expected {expected}")
    if base_srg is not None and check.srg is not None:
        raise AssertionError(
            "the doubled graph must not be strongly regular when the host is")
    strict = check.neumaier and check.srg is None
    return Construction2Result(graph, clique, base, base_edge, base_srg,
                               base_nexus, balance, clique_reg, check,
                               expected, strict)


# ---------------------------------------------------------------------------
# the assembled unbounded-nexus family


@dataclass(frozen=True)
class Theorem2Result:
    construction: Construction2Result
    params: NeumaierParams
    group: FiniteGroup
    clique: Subgroup


def _two_torsion_subgroup(a: FiniteGroup) -> list[int]:
    return [x for x in range(a.order) if a.mul[x][x] == 0]


def _elementary_abelian_basis(a: FiniteGroup, size: int) -> list[int]:
    """Greedy basis of an elementary abelian subgroup of the given size,
    taking smallest-index involutions first."""
    basis: list[int] = []
    members = {0}
    for x in _two_torsion_subgroup(a):
        if x in members or x == 0:
            continue
        new = subgroup_generated(a, basis + [x])
        if len(new) <= size and all(a.mul[y][y] == 0 for y in new.members):
            basis.append(x)
            members = set(new.members)
            if len(members) == size:
                return basis
    raise InvalidInput(
        "a-structure",
        f"no elementary abelian subgroup of order {size} and index 2")


def theorem2_graph(n: int, a_spec: str, *,
                   spread: SpreadFamily | None = None,
                   bent: BooleanFunction | None = None) -> Theorem2Result:
    """Strictly Neumaier Cayley graph with parameters
    (2^(2n+2), (2^(n+1)-1)(2^n+1), 2(2^n-1)(2^(n-1)+1), 2^n, 2^(n+1))
    over A x C2^(n+1), for any abelian A of order 2^(n+1) with an
    elementary abelian subgroup of index 2 and any even n >= 2.

    The spread and the bent function behind the transversal difference
    set default to the first-slopes family and the inner-product bent
    function but may be overridden; any admissible choice verifies.
    """
    if n < 2 or n % 2:
        raise InvalidInput("n", f"n must be even and >= 2, got {n}")
    a = make_group(a_spec)
    if a.order != 1 << (n + 1):
        raise InvalidInput("a-order",
                           f"|A| must be 2^{n + 1}, got {a.order}")
    if not a.is_abelian:
        raise InvalidInput("a-abelian")
    basis = _elementary_abelian_basis(a, 1 << n)

    a0 = make_group(f"C2^{n}")
    embed = []
    for idx in range(1 << n):
        acc = 0
        for i in range(n):
            if (idx >> (n - 1 - i)) & 1:
                acc = a.mul[acc][basis[i]]
        embed.append(acc)

    host = partial_spread_srg(n, spread=spread)
    # change of coordinates: (alpha, y) -> (alpha + x_L(y), y) maps the
    # abstract A0 x H0 onto the baseline and the first spread line
    first_line = host.spread.lines[0]
    size = 1 << n
    x_of_y = [None] * size
    for u in sorted(first_line):
        x, y = u >> n, u & (size - 1)
        if x_of_y[y] is not None:
            raise InvalidInput("spread", "first line is not a graph over y")
        x_of_y[y] = x
    if any(x is None for x in x_of_y):
        raise InvalidInput("spread", "first line misses a y value")
    s0 = frozenset(((u >> n) ^ x_of_y[u & (size - 1)]) << n | (u & (size - 1))
                   for u in host.connection)

    f = bent if bent is not None else maiorana_mcfarland(n // 2)
    if f.arity != n:
        raise InvalidInput("bent-arity", f"bent function must have {n} variables")
    rds = bent_rds(f)

    inp = Construction2Input(a=a, a0=a0, a0_embed=tuple(embed),
                             h0=make_group(f"C2^{n}"), s0=s0,
                             t=rds.members)
    result = construction2(inp)
    q = 1 << n
    expected = NeumaierParams(4 * q * q, (2 * q - 1) * (q + 1),
                              2 * (q - 1) * (q // 2 + 1), q, 2 * q)
    if result.check.params != expected or not result.strict:
        raise AssertionError(
            f"assembled graph failed verification: {result.check.params} "
            f"vs {expected}, strict={result.strict}")
    return Theorem2Result(result, expected, result.graph.group, result.clique)
