"""Verification, classification, search and construction of relative
difference sets.

A subset T of G is a difference set relative to a normal subgroup N when
every element of G \\ N has exactly lambda representations t1*t2^-1 and no
nonidentity element of N has any.  Reversible (T = T^-1) semiregular
(|T| = |G:N|) sets are the ingredient for the clique-spread constructions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

from .errors import NotBentError, NotNormalError, NotRdsError, SearchSpaceTooLarge
from .gf2 import BooleanFunction, is_bent
from .groups import (FiniteGroup, Subgroup, inverse_set, is_normal, make_group,
                     right_cosets, subgroup_generated)
from .groupring import difference_counts

DEFAULT_SEARCH_CAP = 5_000_000


@dataclass(frozen=True)
class RdsParams:
    m: int      # index |G:N|
    n: int      # |N|
    k: int      # |T|
    lam: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.m, self.n, self.k, self.lam)


@dataclass(frozen=True)
class RdsFlags:
    reversible: bool
    semiregular: bool
    transversal: bool


@dataclass(frozen=True)
class RelativeDifferenceSet:
    group: FiniteGroup
    forbidden: Subgroup
    members: frozenset[int]
    params: RdsParams

    @staticmethod
    def verified(group: FiniteGroup, forbidden: Subgroup,
                 members) -> "RelativeDifferenceSet":
        params = verify_rds(group, forbidden, members)
        return RelativeDifferenceSet(group, forbidden, frozenset(members), params)

    @property
    def flags(self) -> RdsFlags:
        return classify_rds(self)

    def to_json_dict(self) -> dict:
        flags = self.flags
        return {
            "group": self.group.descriptor,
            "forbidden": sorted(self.forbidden.members),
            "members": sorted(self.members),
            "params": list(self.params.as_tuple()),
            "flags": {"reversible": flags.reversible,
                      "semiregular": flags.semiregular,
                      "transversal": flags.transversal},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def verify_rds(g: FiniteGroup, n: Subgroup, t) -> RdsParams:
    """Check the difference-set equation for T against forbidden N.

    The ordered difference counts of T must be |T| at the identity, zero
    on N \\ {e}, and one common positive value lambda on G \\ N.  Raises
    NotNormalError / NotRdsError (with the first offending element and
    its count) otherwise.
    """
    if not is_normal(g, n):
        raise NotNormalError("forbidden subgroup is not normal")
    members = sorted(set(t))
    if any(x < 0 or x >= g.order for x in members):
        raise NotRdsError("member index out of range")
    nset = n.member_set
    if len(nset) == g.order:
        raise NotRdsError("no element outside the forbidden subgroup")
    counts = difference_counts(g, members)
    if counts[0] != len(members):
        raise NotRdsError("identity count mismatch", element=0,
                          coefficient=counts[0])
    lam = None
    for z in range(1, g.order):
        c = counts[z]
        if z in nset:
            if c != 0:
                raise NotRdsError(
                    f"forbidden element {z} has {c} difference representations",
                    element=z, coefficient=c)
        else:
            if lam is None:
                lam = c
            elif c != lam:
                raise NotRdsError(
                    f"element {z} has {c} representations, expected {lam}",
                    element=z, coefficient=c)
    if not lam:
        raise NotRdsError("lambda is zero; T is not a difference set",
                          element=None, coefficient=0)
    return RdsParams(m=g.order // len(n), n=len(n), k=len(members), lam=lam)


def classify_rds(r: RelativeDifferenceSet) -> RdsFlags:
    g = r.group
    reversible = r.members == inverse_set(g, r.members)
    semiregular = r.params.m == r.params.k
    cosets = right_cosets(g, r.forbidden)
    transversal = all(
        len(r.members.intersection(cs)) == 1 for cs in cosets.cosets)
    if semiregular:
        # forced identities for semiregular sets
        assert r.params.k == r.params.m == r.params.lam * r.params.n
        assert transversal
        if reversible:
            assert r.members.intersection(r.forbidden.member_set) == {0}
    return RdsFlags(reversible, semiregular, transversal)


def bent_rds(f: BooleanFunction) -> RelativeDifferenceSet:
    """The graph {(x, f(x))} of a bent function as a reversible semiregular
    difference set in C2^(n+1), forbidden subgroup the last coordinate.

    Element (x, eps) has index 2*x + eps, so the forbidden subgroup is
    {0, 1} and the parameters are (2^n, 2, 2^n, 2^(n-1)).
    """
    if f.arity % 2:
        raise NotBentError("arity must be even")
    if not is_bent(f):
        raise NotBentError("function is not bent")
    n = f.arity
    g = make_group(f"C2^{n + 1}")
    forbidden = subgroup_generated(g, [1])
    members = frozenset((x << 1) | f.table[x] for x in range(1 << n))
    rds = RelativeDifferenceSet.verified(g, forbidden, members)
    expected = RdsParams(1 << n, 2, 1 << n, 1 << (n - 1))
    assert rds.params == expected, (rds.params, expected)
    flags = rds.flags
    assert flags.reversible and flags.semiregular and flags.transversal
    return rds


def search_rds(g: FiniteGroup, n: Subgroup, k: int, lam: int, *,
               reversible: bool = False, semiregular: bool = False,
               transversal: bool = False, first_only: bool = False,
               cap: int = DEFAULT_SEARCH_CAP) -> list[frozenset[int]]:
    """All k-subsets of G that verify as difference sets relative to N
    with the given lambda, in lexicographic order.

    Backtracking prunes a branch as soon as any count on N \\ {e} is hit
    or any count on G \\ N exceeds lambda.  ``transversal`` restricts the
    search to one element per N-coset (which semiregular sets must be);
    otherwise C(|G|, k) must stay under the cap.
    """
    if not is_normal(g, n):
        raise NotNormalError("forbidden subgroup is not normal")
    nset = n.member_set
    if len(nset) == g.order:
        return []
    if semiregular and k != g.order // len(n):
        return []
    restrict = transversal or semiregular
    if not restrict and comb(g.order, k) > cap:
        raise SearchSpaceTooLarge(
            f"C({g.order},{k}) exceeds cap {cap}; use transversal search")

    mul, inv = g.mul, g.inv
    counts = [0] * g.order
    chosen: list[int] = []
    results: list[frozenset[int]] = []
    cosets = right_cosets(g, n)

    def violates(t: int) -> bool:
        """Add t's differences to counts; True (after full add) if a
        pruning bound is violated."""
        bad = False
        for t0 in chosen:
            for d in (mul[t][inv[t0]], mul[t0][inv[t]]):
                counts[d] += 1
                if d in nset:
                    bad = True
                elif counts[d] > lam:
                    bad = True
        return bad

    def unadd(t: int) -> None:
        for t0 in chosen:
            counts[mul[t][inv[t0]]] -= 1
            counts[mul[t0][inv[t]]] -= 1

    def accept() -> None:
        members = frozenset(chosen)
        if reversible and members != inverse_set(g, members):
            return
        try:
            rds = RelativeDifferenceSet.verified(g, n, members)
        except NotRdsError:
            return
        if rds.params.lam != lam:
            return
        if semiregular and not rds.flags.semiregular:
            return
        results.append(members)

    def rec_free(start: int) -> bool:
        if len(chosen) == k:
            accept()
            return not (first_only and results)
        # not enough elements left to finish
        if g.order - start < k - len(chosen):
            return True
        for t in range(start, g.order):
            if reversible and inv[t] < t and inv[t] not in chosen:
                continue
            bad = violates(t)
            if not bad:
                chosen.append(t)
                cont = rec_free(t + 1)
                chosen.pop()
                unadd(t)
                if not cont:
                    return False
            else:
                unadd(t)
        return True

    def rec_coset(ci: int) -> bool:
        if len(chosen) == k:
            accept()
            return not (first_only and results)
        if ci == len(cosets.cosets) or len(cosets.cosets) - ci < k - len(chosen):
            return True
        # either skip this coset (when k < number of cosets) or pick one element
        for t in cosets.cosets[ci]:
            bad = violates(t)
            if not bad:
                chosen.append(t)
                cont = rec_coset(ci + 1)
                chosen.pop()
                unadd(t)
                if not cont:
                    return False
            else:
                unadd(t)
        if len(cosets.cosets) - (ci + 1) >= k - len(chosen):
            return rec_coset(ci + 1)
        return True

    if restrict:
        rec_coset(0)
    else:
        rec_free(0)
    return sorted(results, key=lambda s: sorted(s))
