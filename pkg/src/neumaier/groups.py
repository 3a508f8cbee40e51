"""Finite groups as explicit multiplication tables.

Elements are the integers ``0..order-1`` and index 0 is always the
identity.  Groups are built from structure strings (``C8``, ``D16``,
``C2^6``, ``C4xC2^4``) or by direct products, and are immutable after
construction, so they are safe to share between workers.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GroupOrderError, GroupSpecError

DEFAULT_MAX_ORDER = 1024

_FACTOR_RE = re.compile(r"^([CD])(\d+)(?:\^(\d+))?$")


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``mul[x][y]`` is the product x*y, ``inv[x]`` the inverse of x, and
    ``labels[x]`` a display string for element x.  ``descriptor`` is the
    normalized structure string the group was built from.
    """

    order: int
    mul: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    labels: tuple[str, ...]
    descriptor: str

    def __repr__(self) -> str:
        return f"FiniteGroup({self.descriptor!r}, order={self.order})"

    @cached_property
    def is_abelian(self) -> bool:
        m = self.mul
        n = self.order
        return all(m[x][y] == m[y][x] for x in range(n) for y in range(x + 1, n))

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        orders = []
        for x in range(self.order):
            y, k = x, 1
            while y != 0:
                y = self.mul[y][x]
                k += 1
            orders.append(k)
        return tuple(orders)

    @cached_property
    def exponent(self) -> int:
        e = 1
        for o in self.element_orders:
            g = _gcd(e, o)
            e = e // g * o
        return e

    @cached_property
    def conjugacy_class_sizes(self) -> tuple[int, ...]:
        """Size of the conjugacy class of each element."""
        n = self.order
        sizes = [0] * n
        seen = [False] * n
        for x in range(n):
            if seen[x]:
                continue
            cls = {self.mul[self.mul[g][x]][self.inv[g]] for g in range(n)}
            for y in cls:
                seen[y] = True
                sizes[y] = len(cls)
        return tuple(sizes)

    def conjugate(self, g: int, x: int) -> int:
        """g * x * g^-1."""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def to_json_dict(self) -> dict:
        """Serialize as {descriptor, order, mul (row-major), labels}."""
        return {
            "descriptor": self.descriptor,
            "order": self.order,
            "mul": [v for row in self.mul for v in row],
            "labels": list(self.labels),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "FiniteGroup":
        order = int(data["order"])
        flat = [int(v) for v in data["mul"]]
        if len(flat) != order * order:
            raise GroupSpecError("mul table length does not match order^2")
        mul = tuple(tuple(flat[i * order:(i + 1) * order]) for i in range(order))
        inv = _inverse_table(mul)
        labels = tuple(str(s) for s in data.get("labels", range(order)))
        g = FiniteGroup(order, mul, inv, labels, str(data.get("descriptor", "?")))
        validate_group(g)
        return g

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=False)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of ``parent`` given by its sorted member indices."""

    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        if not self.members or self.members[0] != 0:
            raise GroupSpecError("subgroup must contain the identity (index 0)")

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.member_set


@dataclass(frozen=True)
class CosetDecomposition:
    """Right cosets Hg_1, ..., Hg_n of a subgroup, with g_1 = e.

    Every coset representative is the minimum element index of its coset,
    so the decomposition is deterministic.
    """

    subgroup: Subgroup
    reps: tuple[int, ...]
    cosets: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.cosets)

    @cached_property
    def coset_of(self) -> tuple[int, ...]:
        """Map element index -> coset position."""
        v = self.subgroup.parent.order
        where = [0] * v
        for i, cs in enumerate(self.cosets):
            for x in cs:
                where[x] = i
        return tuple(where)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _inverse_table(mul) -> tuple[int, ...]:
    n = len(mul)
    inv = [-1] * n
    for x in range(n):
        for y in range(n):
            if mul[x][y] == 0:
                inv[x] = y
                break
        if inv[x] < 0:
            raise GroupSpecError(f"element {x} has no inverse")
    return tuple(inv)


def cyclic_group(n: int) -> FiniteGroup:
    """Cyclic group C_n, written additively on 0..n-1."""
    if n < 1:
        raise GroupSpecError(f"cyclic order must be >= 1, got {n}")
    mul = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    inv = tuple((-a) % n for a in range(n))
    labels = tuple(str(a) for a in range(n))
    return FiniteGroup(n, mul, inv, labels, f"C{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order n (n even, n >= 2).

    Elements 0..n/2-1 are the rotations r^i; elements n/2..n-1 are the
    reflections s*r^i, with s*r^i*s = r^-i.
    """
    if n < 2 or n % 2:
        raise GroupSpecError(f"dihedral order must be even and >= 2, got {n}")
    m = n // 2
    mul = [[0] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            mul[i][j] = (i + j) % m                      # r^i * r^j
            mul[i][m + j] = m + (j - i) % m              # r^i * s r^j = s r^(j-i)
            mul[m + i][j] = m + (i + j) % m              # s r^i * r^j
            mul[m + i][m + j] = (j - i) % m              # s r^i * s r^j = r^(j-i)
    mul = tuple(tuple(row) for row in mul)
    inv = _inverse_table(mul)
    labels = tuple([f"r{i}" for i in range(m)] + [f"sr{i}" for i in range(m)])
    return FiniteGroup(n, mul, inv, labels, f"D{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup,
                   max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Direct product with row-major element layout.

    Element (x, y) has index x*|b| + y, so the first factor is the major
    index.  The identity (e, e) therefore stays at index 0.
    """
    if a.order * b.order > max_order:
        raise GroupOrderError(
            f"direct product order {a.order * b.order} exceeds maximum {max_order}")
    nb = b.order
    amul, bmul = a.mul, b.mul
    rows = []
    for xa in range(a.order):
        for xb in range(nb):
            row = [0] * (a.order * nb)
            arow = amul[xa]
            brow = bmul[xb]
            for ya in range(a.order):
                base = arow[ya] * nb
                off = ya * nb
                for yb in range(nb):
                    row[off + yb] = base + brow[yb]
            rows.append(tuple(row))
    mul = tuple(rows)
    inv = tuple(a.inv[xa] * nb + b.inv[xb]
                for xa in range(a.order) for xb in range(nb))
    labels = tuple(f"{a.labels[xa]},{b.labels[xb]}"
                   for xa in range(a.order) for xb in range(nb))
    return FiniteGroup(a.order * b.order, mul, inv, labels,
                       f"{a.descriptor}x{b.descriptor}")


def _parse_factors(spec: str) -> list[tuple[str, int]]:
    s = spec.replace(" ", "")
    if not s:
        raise GroupSpecError("empty group spec")
    factors: list[tuple[str, int]] = []
    for part in s.split("x"):
        m = _FACTOR_RE.match(part)
        if not m:
            raise GroupSpecError(f"cannot parse group factor {part!r} in {spec!r}")
        kind, order, power = m.group(1), int(m.group(2)), m.group(3)
        reps = int(power) if power else 1
        if reps < 1:
            raise GroupSpecError(f"factor power must be >= 1 in {part!r}")
        if kind == "D" and (order < 2 or order % 2):
            raise GroupSpecError(f"dihedral order must be even, got {part!r}")
        factors.extend([(kind, order)] * reps)
    return factors


def normalize_spec(spec: str) -> str:
    """Canonical form of a structure string: runs of equal factors collapse
    to ``F^k`` but factor order is preserved (it fixes the element layout)."""
    factors = _parse_factors(spec)
    out = []
    i = 0
    while i < len(factors):
        j = i
        while j < len(factors) and factors[j] == factors[i]:
            j += 1
        kind, order = factors[i]
        out.append(f"{kind}{order}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "x".join(out)


def make_group(spec: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Build a group from a structure string.

    Grammar: ``C<n>`` cyclic of order n, ``D<n>`` dihedral of order n
    (n even), ``x`` for direct products, ``^k`` for repeated factors.
    """
    factors = _parse_factors(spec)
    total = 1
    for _, order in factors:
        total *= order
        if total > max_order:
            raise GroupOrderError(
                f"group order for {spec!r} exceeds maximum {max_order}")
    group: FiniteGroup | None = None
    for kind, order in factors:
        g = cyclic_group(order) if kind == "C" else dihedral_group(order)
        group = g if group is None else direct_product(group, g, max_order)
    assert group is not None
    # descriptor echoes the normalized spec rather than the nested chain
    return FiniteGroup(group.order, group.mul, group.inv, group.labels,
                       normalize_spec(spec))


def validate_group(g: FiniteGroup, check_associativity: bool = True) -> None:
    """Check the full group axioms; raises GroupSpecError on violation.

    Associativity is checked exhaustively (vectorized) for order <= 128,
    which covers everything the enumeration operates on.
    """
    n = g.order
    if len(g.mul) != n or any(len(row) != n for row in g.mul):
        raise GroupSpecError("multiplication table is not order x order")
    for x in range(n):
        if g.mul[0][x] != x or g.mul[x][0] != x:
            raise GroupSpecError(f"index 0 is not an identity at element {x}")
        if g.mul[x][g.inv[x]] != 0 or g.mul[g.inv[x]][x] != 0:
            raise GroupSpecError(f"inverse table wrong at element {x}")
        if sorted(g.mul[x]) != list(range(n)):
            raise GroupSpecError(f"row {x} of mul is not a permutation")
    for y in range(n):
        col = sorted(g.mul[x][y] for x in range(n))
        if col != list(range(n)):
            raise GroupSpecError(f"column {y} of mul is not a permutation")
    if check_associativity and n <= 128:
        m = np.array(g.mul, dtype=np.int64)
        left = m[m, :]          # left[x,y,z] = (x*y)*z
        right = m[:, m]         # right[x,y,z] = x*(y*z)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            raise GroupSpecError(f"associativity fails at {tuple(bad)}")


def subgroup_generated(g: FiniteGroup, gens) -> Subgroup:
    """Smallest subgroup containing ``gens`` (closure under multiplication)."""
    gens = sorted(set(gens))
    members = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for h in gens:
            y = g.mul[x][h]
            if y not in members:
                members.add(y)
                frontier.append(y)
    return Subgroup(g, tuple(sorted(members)))


def right_cosets(g: FiniteGroup, h: Subgroup) -> CosetDecomposition:
    """Partition of G into right cosets Hg, ordered by minimum element.

    The first coset is H itself (representative e); every other coset's
    representative is its minimum element index.
    """
    v = g.order
    seen = [False] * v
    reps: list[int] = []
    cosets: list[tuple[int, ...]] = []
    for x in range(v):
        if seen[x]:
            continue
        coset = sorted(g.mul[m][x] for m in h.members)
        for y in coset:
            seen[y] = True
        reps.append(x)
        cosets.append(tuple(coset))
    return CosetDecomposition(h, tuple(reps), tuple(cosets))


def is_normal(g: FiniteGroup, h: Subgroup) -> bool:
    hs = h.member_set
    return all(g.conjugate(x, m) in hs for x in range(g.order) for m in h.members)


def inverse_set(g: FiniteGroup, xs) -> frozenset[int]:
    return frozenset(g.inv[x] for x in xs)


def is_inverse_closed(g: FiniteGroup, xs) -> bool:
    s = set(xs)
    return all(g.inv[x] in s for x in s)


def subgroups_of_order(g: FiniteGroup, k: int) -> list[Subgroup]:
    """All subgroups of the given order, built bottom-up through the
    subgroup lattice (every subgroup is reached by adding one generator
    at a time).  Deterministic order: sorted by member tuple."""
    if g.order % k:
        return []
    found: set[tuple[int, ...]] = set()
    level = {(0,)}
    all_of_order: set[tuple[int, ...]] = set()
    while level:
        nxt: set[tuple[int, ...]] = set()
        for members in level:
            if len(members) == k:
                all_of_order.add(members)
                continue
            if len(members) >= k:
                continue
            mset = set(members)
            for x in range(1, g.order):
                if x in mset:
                    continue
                closure = subgroup_generated(g, list(members) + [x])
                t = closure.members
                if len(t) <= k and t not in found:
                    found.add(t)
                    nxt.add(t)
        level = nxt
    if k == 1:
        all_of_order = {(0,)}
    return [Subgroup(g, t) for t in sorted(all_of_order)]
