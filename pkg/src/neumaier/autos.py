"""Group automorphisms by backtracking over generator images.

The search assigns images to a greedy generating chain, filtered by
element order and conjugacy-class size, and closes the partial map under
products.  Desk-scale orders make the complete listing feasible; a node
budget turns pathological cases (large elementary abelian groups) into an
explicit error instead of an open-ended run.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

from .errors import AutBudgetExceeded, OrbitCapExceeded
from .groups import FiniteGroup, subgroup_generated

DEFAULT_AUT_BUDGET = 2_000_000
DEFAULT_ORBIT_CAP = 200_000


@dataclass(frozen=True)
class Automorphism:
    """An automorphism as a permutation of element indices (perm[0] == 0)."""

    perm: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.perm[x]

    def apply_set(self, xs) -> frozenset[int]:
        return frozenset(self.perm[x] for x in xs)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: (self*other)(x) = self(other(x))."""
        p, q = self.perm, other.perm
        return Automorphism(tuple(p[q[x]] for x in range(len(p))))

    def inverse(self) -> "Automorphism":
        p = self.perm
        out = [0] * len(p)
        for x, y in enumerate(p):
            out[y] = x
        return Automorphism(tuple(out))


def is_automorphism(g: FiniteGroup, perm) -> bool:
    n = g.order
    if sorted(perm) != list(range(n)) or perm[0] != 0:
        return False
    mul = g.mul
    return all(perm[mul[x][y]] == mul[perm[x]][perm[y]]
               for x in range(n) for y in range(n))


def generating_chain(g: FiniteGroup) -> list[int]:
    """Greedy generating set: repeatedly adjoin the smallest element
    outside the subgroup generated so far."""
    gens: list[int] = []
    members = {0}
    while len(members) < g.order:
        x = min(i for i in range(g.order) if i not in members)
        gens.append(x)
        members = set(subgroup_generated(g, gens).members)
    return gens


def _element_keys(g: FiniteGroup) -> list[tuple[int, int]]:
    orders = g.element_orders
    classes = g.conjugacy_class_sizes
    return [(orders[x], classes[x]) for x in range(g.order)]


def _search(g: FiniteGroup, budget: int, constraints) -> tuple[list[tuple[int, ...]], bool]:
    """Backtracking core shared by the full and the constrained search.

    ``constraints`` is a list of membership arrays; every assignment
    x -> y must satisfy inside[x] == inside[y] for each of them.
    Returns (perms found, search completed?).
    """
    n = g.order
    mul = g.mul
    gens = generating_chain(g)
    keys = _element_keys(g)
    candidates = [
        sorted(y for y in range(n)
               if keys[y] == keys[gen]
               and all(c[y] == c[gen] for c in constraints))
        for gen in gens
    ]

    perm = [-1] * n
    used = [False] * n
    perm[0] = 0
    used[0] = True
    found: list[tuple[int, ...]] = []
    nodes = 0
    complete = True

    def close(assigned: list[tuple[int, int]], x: int, y: int,
              trail: list[int]) -> bool:
        """Assign perm[x] = y and close under right products with the
        assigned generators; False on any inconsistency."""
        stack = [(x, y)]
        while stack:
            a, b = stack.pop()
            pa = perm[a]
            if pa != -1:
                if pa != b:
                    return False
                continue
            if used[b]:
                return False
            for c in constraints:
                if c[a] != c[b]:
                    return False
            perm[a] = b
            used[b] = True
            trail.append(a)
            for gen, img in assigned:
                stack.append((mul[a][gen], mul[b][img]))
        return True

    def undo(trail: list[int]) -> None:
        for a in trail:
            used[perm[a]] = False
            perm[a] = -1

    def rec(level: int, assigned: list[tuple[int, int]]) -> bool:
        """Returns False when the budget tripped (abort the search)."""
        nonlocal nodes, complete
        if level == len(gens):
            found.append(tuple(perm))
            return True
        gen = gens[level]
        for y in candidates[level]:
            nodes += 1
            if nodes > budget:
                complete = False
                return False
            if used[y] and perm[gen] != y:
                continue
            trail: list[int] = []
            assigned.append((gen, y))
            ok = close(assigned, gen, y, trail)
            if ok:
                # re-close existing mapped elements against the new generator
                extra: list[tuple[int, int]] = []
                for a in range(n):
                    if perm[a] != -1:
                        extra.append((a, perm[a]))
                for a, b in extra:
                    if not close(assigned, mul[a][gen], mul[b][y], trail):
                        ok = False
                        break
            if ok:
                if not rec(level + 1, assigned):
                    assigned.pop()
                    undo(trail)
                    return False
            assigned.pop()
            undo(trail)
        return True

    rec(0, [])
    return sorted(found), complete


def automorphism_group(g: FiniteGroup,
                       budget: int = DEFAULT_AUT_BUDGET) -> list[Automorphism]:
    """The complete automorphism group, lexicographically ordered.

    Raises AutBudgetExceeded (carrying the automorphisms found so far)
    when the search would exceed the node budget; the result is never a
    silent partial answer.
    """
    perms, complete = _search(g, budget, [])
    if not complete:
        raise AutBudgetExceeded(
            f"automorphism search for {g.descriptor} exceeded budget {budget}",
            found=[Automorphism(p) for p in perms])
    return [Automorphism(p) for p in perms]


def stabilizer_search(g: FiniteGroup, fixed_sets,
                      budget: int = DEFAULT_AUT_BUDGET
                      ) -> tuple[list[Automorphism], bool]:
    """Automorphisms fixing each of ``fixed_sets`` setwise.

    Returns (automorphisms, complete).  On budget exhaustion the list is
    a verified but possibly incomplete set of stabilizer elements, which
    is still sound to use for orbit seeding (it only weakens dedup).
    """
    constraints = []
    for s in fixed_sets:
        inside = [False] * g.order
        for x in s:
            inside[x] = True
        constraints.append(inside)
    perms, complete = _search(g, budget, constraints)
    return [Automorphism(p) for p in perms], complete


def setwise_stabilizer(auts, s) -> list[Automorphism]:
    """Sublist of automorphisms fixing the set s setwise."""
    target = frozenset(s)
    return [a for a in auts if a.apply_set(target) == target]


def msubset_orbit_reps(stab, coset, m: int,
                       cap: int = DEFAULT_ORBIT_CAP) -> list[tuple[int, ...]]:
    """One representative (the lexicographic minimum) per orbit of the
    stabilizer action on m-subsets of the coset."""
    return [rep for rep, _ in msubset_orbits(stab, coset, m, cap=cap)]


def msubset_orbits(stab, coset, m: int,
                   cap: int = DEFAULT_ORBIT_CAP
                   ) -> list[tuple[tuple[int, ...], dict]]:
    """Orbit partition of m-subsets of the coset under the given
    automorphisms.

    Returns (rep, cover) pairs in lexicographic order of rep, where
    ``cover`` maps every subset of the orbit to an Automorphism carrying
    it onto the representative.
    """
    elements = sorted(coset)
    if m > len(elements):
        raise ValueError("m exceeds coset size")
    if comb(len(elements), m) > cap:
        raise OrbitCapExceeded(
            f"C({len(elements)},{m}) m-subsets exceed cap {cap}")
    perms = [a if isinstance(a, Automorphism) else Automorphism(tuple(a))
             for a in stab]
    if not perms:
        raise ValueError("stab must contain at least the identity automorphism")
    for a in perms:
        if a.apply_set(elements) != frozenset(elements):
            raise ValueError("stabilizer element does not fix the coset")
    inverses = [a.inverse() for a in perms]
    identity = Automorphism(tuple(range(len(perms[0].perm))))

    out: list[tuple[tuple[int, ...], dict]] = []
    visited: set[tuple[int, ...]] = set()
    for sub in itertools.combinations(elements, m):
        if sub in visited:
            continue
        cover: dict[tuple[int, ...], Automorphism] = {sub: identity}
        visited.add(sub)
        frontier = [sub]
        while frontier:
            cur = frontier.pop()
            to_rep = cover.get(cur)
            for a, ainv in zip(perms, inverses):
                img = tuple(sorted(a.perm[x] for x in cur))
                if img not in visited:
                    visited.add(img)
                    # (to_rep o a^-1) maps img back onto the representative
                    cover[img] = to_rep.compose(ainv)
                    frontier.append(img)
        out.append((sub, cover))
    return out
