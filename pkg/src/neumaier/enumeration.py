"""Isomorph-reduced enumeration of Neumaier Cayley graphs with a
subgroup-coset clique spread, plus the brute-force oracle and census
deduplication.

The search walks the non-subgroup cosets in representative order, picks
an m-subset per coset, forces elements whose inverses were already
chosen, and prunes on inverse-consistency and (optionally) on partial
sums of the two triangle conditions.  Orbit seeding on the second coset
under the coset stabilizer inside Aut(G) removes equivalent subtrees;
when the full automorphism group is too large to list, a budgeted
constrained search supplies stabilizer generators, which is still sound
(it only weakens the reduction).
"""
from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass, field, replace
from math import comb

from .autos import (Automorphism, automorphism_group, msubset_orbits,
                    setwise_stabilizer, stabilizer_search)
from .canon import are_isomorphic, canonical_form, invariant_key
from .constructions import theorem1_check
from .errors import (AutBudgetExceeded, InfeasibleParameters, IsoUndecided,
                     NotEdgeRegularError, NotRegularError, NotSrgError,
                     SearchSpaceTooLarge)
from .graphs import (CayleyGraph, NeumaierParams, materialize,
                     strictly_neumaier_check, strongly_regular)
from .groups import FiniteGroup, Subgroup, right_cosets

ENV_BUDGET = "NEUMAIER_BUDGET"
DEFAULT_NODE_BUDGET = 200_000_000


def _default_budget() -> int:
    raw = os.environ.get(ENV_BUDGET)
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class EnumerationOptions:
    dedupe: str = "certificate"          # "none" or "certificate"
    collect_sets: bool = True
    node_budget: int | None = None       # None: NEUMAIER_BUDGET or default
    strong_prune: bool = False           # partial triangle-count pruning
    jobs: int = 1
    backend: str = "auto"                # "auto", "python" or "fast"
    aut_budget: int = 60_000
    orbit_cap: int = 200_000
    canon_budget: int = 500_000
    iso_cap: int = 300_000
    brute_cap: int = 2_000_000
    verify_each: bool = True


@dataclass(frozen=True)
class EnumerationTask:
    group: FiniteGroup
    subgroup: Subgroup
    target: NeumaierParams
    options: EnumerationOptions = field(default_factory=EnumerationOptions)

    def __post_init__(self):
        v, s = self.group.order, len(self.subgroup)
        t = self.target
        if t.v != v or t.s != s:
            raise InfeasibleParameters(
                f"target {t.as_tuple()} does not match |G|={v}, |H|={s}")
        if not (1 <= t.m <= s - 1):
            raise InfeasibleParameters("nexus must satisfy 1 <= m <= s-1")


@dataclass(frozen=True)
class CensusClass:
    certificate: str                     # lowercase hex
    multiplicity: int
    group: str
    subgroup: tuple[int, ...]
    representative: tuple[int, ...]      # the T part of S = H# u T
    params: NeumaierParams
    strict: bool

    def to_json_dict(self) -> dict:
        return {
            "params": list(self.params.as_tuple()),
            "certificate": self.certificate,
            "group": self.group,
            "subgroup": list(self.subgroup),
            "connection_t": list(self.representative),
            "multiplicity": self.multiplicity,
            "strict": self.strict,
        }


@dataclass
class EnumerationResult:
    group: str
    subgroup: tuple[int, ...]
    target: NeumaierParams
    connection_sets: list[tuple[int, ...]]
    classes: list[CensusClass]
    counts: dict
    stats: dict
    exhaustive: bool


class _StopSearch(Exception):
    pass


class _CosetSearch:
    """Backtracking over m-subsets of the non-subgroup cosets."""

    def __init__(self, g: FiniteGroup, h: Subgroup, target: NeumaierParams,
                 options: EnumerationOptions):
        self.g = g
        self.h = h
        self.target = target
        self.options = options
        self.mul = g.mul
        self.inv = g.inv
        self.cosets = right_cosets(g, h)
        self.n = len(self.cosets)
        self.m = target.m
        self.s = target.s
        self.t2 = target.lam - target.s + 2
        self.t3 = target.lam - 2 * target.m + 2
        self.coset_masks = [self._mask(cs) for cs in self.cosets.cosets]
        self.budget = (options.node_budget if options.node_budget is not None
                       else _default_budget())
        self.nodes = 0
        self.stats = {"nodes": 0, "prune_forced": 0, "prune_inverse": 0,
                      "prune_partial2": 0, "prune_partial3": 0,
                      "leaves": 0, "found": 0}
        self.results: list[int] = []
        if options.strong_prune:
            self._prepare_strong()

    @staticmethod
    def _mask(xs) -> int:
        mask = 0
        for x in xs:
            mask |= 1 << x
        return mask

    def _inv_mask(self, mask: int) -> int:
        out = 0
        inv = self.inv
        while mask:
            low = mask & -mask
            out |= 1 << inv[low.bit_length() - 1]
            mask ^= low
        return out

    def _right_mul(self, mask: int, y: int) -> int:
        out = 0
        mul = self.mul
        while mask:
            low = mask & -mask
            out |= 1 << mul[low.bit_length() - 1][y]
            mask ^= low
        return out

    def _prepare_strong(self):
        """Pair schedules for the partial triangle-count bounds.

        For h in H# the sum of |T_a h n T_b| over coset pairs with
        H g_a h = H g_b must reach exactly lam - s + 2; the pair (a, b)
        is countable once both cosets are chosen.  Condition (3) gets the
        analogous schedule per chosen element g.
        """
        coset_of = self.cosets.coset_of
        reps = self.cosets.reps
        self.h_elems = list(self.h.members[1:])
        self.sigma2 = []       # per h: sigma[a] = coset position of Hg_a h
        self.complete2 = []    # per h: depth -> list of pairs (a, b)
        for hh in self.h_elems:
            sigma = [coset_of[self.mul[reps[a]][hh]] for a in range(self.n)]
            byd = [[] for _ in range(self.n + 1)]
            for a in range(1, self.n):
                b = sigma[a]
                byd[max(a, b)].append((a, b))
            self.sigma2.append(sigma)
            self.complete2.append(byd)
        # for condition (3) the permutation depends on the chosen element;
        # computed lazily per element and cached
        self._sigma3_cache: dict[int, list[int]] = {}

    def _sigma3(self, t: int) -> list[int]:
        sig = self._sigma3_cache.get(t)
        if sig is None:
            coset_of = self.cosets.coset_of
            reps = self.cosets.reps
            sig = [coset_of[self.mul[reps[a]][t]] for a in range(self.n)]
            self._sigma3_cache[t] = sig
        return sig

    # -- the search ---------------------------------------------------

    def run(self, seeds) -> bool:
        """Search below each seed T2; returns True when exhaustive."""
        try:
            for seed in seeds:
                self._run_seed(seed)
        except _StopSearch:
            return False
        return True

    def _run_seed(self, seed) -> None:
        t2_mask = self._mask(seed)
        coset2 = self.coset_masks[1]
        inv_t2 = self._inv_mask(t2_mask)
        self._node()
        if inv_t2 & coset2 & ~t2_mask:
            self.stats["prune_inverse"] += 1
            return
        chosen = [0] * self.n
        chosen[1] = t2_mask
        state2 = state3 = None
        if self.options.strong_prune:
            state2, state3 = self._strong_init(chosen)
            if state2 is None:
                return
        self._rec(2, chosen, t2_mask, inv_t2, coset2, state2, state3)

    def _node(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _StopSearch

    def _rec(self, i, chosen, union, inv_union, processed, state2, state3):
        if i == self.n:
            self._leaf(union)
            return
        cmask = self.coset_masks[i]
        forced = cmask & inv_union
        nf = forced.bit_count()
        if nf > self.m:
            self.stats["prune_forced"] += 1
            return
        free = sorted(self._bits(cmask & ~forced))
        for extra in itertools.combinations(free, self.m - nf):
            self._node()
            ti = forced
            for x in extra:
                ti |= 1 << x
            inv_ti = self._inv_mask(ti)
            new_union = union | ti
            if inv_ti & (processed | cmask) & ~new_union:
                self.stats["prune_inverse"] += 1
                continue
            chosen[i] = ti
            if self.options.strong_prune:
                s2, s3 = self._strong_step(i, chosen, state2, state3)
                if s2 is None:
                    chosen[i] = 0
                    continue
                self._rec(i + 1, chosen, new_union, inv_union | inv_ti,
                          processed | cmask, s2, s3)
            else:
                self._rec(i + 1, chosen, new_union, inv_union | inv_ti,
                          processed | cmask, None, None)
            chosen[i] = 0

    @staticmethod
    def _bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def _leaf(self, t_mask: int) -> None:
        self.stats["leaves"] += 1
        if self._inv_mask(t_mask) != t_mask:
            return
        for hh in self.h.members[1:]:
            if (self._right_mul(t_mask, hh) & t_mask).bit_count() != self.t2:
                return
        for t in self._bits(t_mask):
            if (self._right_mul(t_mask, t) & t_mask).bit_count() != self.t3:
                return
        self.stats["found"] += 1
        self.results.append(t_mask)

    # -- optional partial-sum pruning ----------------------------------

    def _strong_init(self, chosen):
        """State after T2: counts and completed-pair tallies; None when a
        bound is already violated."""
        state2 = []
        for hi in range(len(self.h_elems)):
            cnt = done = 0
            for (a, b) in self.complete2[hi][1]:
                cnt += (self._right_mul(chosen[a], self.h_elems[hi])
                        & chosen[b]).bit_count()
                done += 1
            state2.append((cnt, done))
        state3 = {}
        for t in self._bits(chosen[1]):
            sig = self._sigma3(t)
            cnt = done = 0
            for a in range(1, self.n):
                if max(a, sig[a]) <= 1:
                    cnt += (self._right_mul(chosen[a], t)
                            & chosen[sig[a]]).bit_count()
                    done += 1
            state3[t] = (cnt, done)
        if not self._strong_ok(state2, state3, 1):
            self.stats["prune_partial2"] += 1
            return None, None
        return state2, state3

    def _strong_step(self, i, chosen, state2, state3):
        new2 = []
        for hi, (cnt, done) in enumerate(state2):
            hh = self.h_elems[hi]
            for (a, b) in self.complete2[hi][i]:
                cnt += (self._right_mul(chosen[a], hh)
                        & chosen[b]).bit_count()
                done += 1
            new2.append((cnt, done))
            if cnt > self.t2:
                self.stats["prune_partial2"] += 1
                return None, None
        new3 = {}
        for t, (cnt, done) in state3.items():
            sig = self._sigma3(t)
            for a in range(1, self.n):
                if max(a, sig[a]) == i:
                    cnt += (self._right_mul(chosen[a], t)
                            & chosen[sig[a]]).bit_count()
                    done += 1
            new3[t] = (cnt, done)
            if cnt > self.t3:
                self.stats["prune_partial3"] += 1
                return None, None
        for t in self._bits(chosen[i]):
            sig = self._sigma3(t)
            cnt = done = 0
            for a in range(1, self.n):
                if max(a, sig[a]) <= i:
                    cnt += (self._right_mul(chosen[a], t)
                            & chosen[sig[a]]).bit_count()
                    done += 1
            new3[t] = (cnt, done)
            if cnt > self.t3:
                self.stats["prune_partial3"] += 1
                return None, None
        if not self._strong_ok(new2, new3, i):
            return None, None
        return new2, new3

    def _strong_ok(self, state2, state3, depth) -> bool:
        pairs_total = self.n - 1
        for cnt, done in state2:
            if cnt > self.t2 or cnt + self.m * (pairs_total - done) < self.t2:
                self.stats["prune_partial2"] += 1
                return False
        for cnt, done in state3.values():
            if cnt > self.t3 or cnt + self.m * (pairs_total - done) < self.t3:
                self.stats["prune_partial3"] += 1
                return False
        return True


def _seed_stabilizer(g: FiniteGroup, h: Subgroup, coset2,
                     options: EnumerationOptions):
    """Stabilizer of the second coset inside Aut(G), or a budget-limited
    generator set for it."""
    try:
        auts = automorphism_group(g, budget=options.aut_budget)
        return setwise_stabilizer(auts, coset2), "full"
    except AutBudgetExceeded:
        stab, complete = stabilizer_search(
            g, [set(h.members), set(coset2)], budget=options.aut_budget)
        return stab, ("full" if complete else "generators")


def _compute_seeds(g: FiniteGroup, h: Subgroup, m: int,
                   options: EnumerationOptions):
    cosets = right_cosets(g, h)
    coset2 = cosets.cosets[1]
    stab, mode = _seed_stabilizer(g, h, coset2, options)
    orbits = msubset_orbits(stab, coset2, m, cap=options.orbit_cap)
    return [rep for rep, _ in orbits], mode


def _use_fast_backend(task: EnumerationTask) -> bool:
    from . import _fastsearch
    if task.options.backend == "python":
        return False
    ok = _fastsearch.eligible(task.group, task.subgroup)
    if task.options.backend == "fast" and not ok:
        raise InfeasibleParameters("fast backend not eligible for this task")
    return ok


def _run_seeds_sequential(task: EnumerationTask, seeds):
    g, h = task.group, task.subgroup
    if _use_fast_backend(task):
        from ._fastsearch import FastContext
        target = task.target
        ctx = FastContext(g, h, target.m, target.lam - target.s + 2,
                          target.lam - 2 * target.m + 2)
        budget = (task.options.node_budget
                  if task.options.node_budget is not None
                  else _default_budget())
        results: list[int] = []
        stats: dict = {}
        exhaustive = True
        spent = 0
        for seed in seeds:
            masks, seed_stats, completed = ctx.run_seed(
                seed, task.options.strong_prune, budget - spent)
            results.extend(masks)
            spent += seed_stats["nodes"]
            for key, val in seed_stats.items():
                stats[key] = stats.get(key, 0) + val
            if not completed:
                exhaustive = False
                break
        stats.setdefault("nodes", spent)
        stats["backend"] = "fast"
        return results, stats, exhaustive
    search = _CosetSearch(g, h, task.target, task.options)
    exhaustive = search.run(seeds)
    stats = search.stats
    stats["nodes"] = search.nodes
    stats["backend"] = "python"
    return search.results, stats, exhaustive


def _search_raw(task: EnumerationTask):
    g, h = task.group, task.subgroup
    seeds, stab_mode = _compute_seeds(g, h, task.target.m, task.options)
    if task.options.jobs > 1 and len(seeds) > 1:
        exhaustive, results, stats = _parallel_seeds(task, seeds)
    else:
        results, stats, exhaustive = _run_seeds_sequential(task, seeds)
    stats["seeds"] = len(seeds)
    stats["stabilizer"] = stab_mode
    return results, stats, exhaustive


def _seed_worker(args):
    group_dict, h_members, target_tuple, options_dict, seed = args
    g = FiniteGroup.from_json_dict(group_dict)
    h = Subgroup(g, tuple(h_members))
    target = NeumaierParams(*target_tuple)
    options = EnumerationOptions(**options_dict)
    task = EnumerationTask(g, h, target, options)
    return _run_seeds_sequential(task, [tuple(seed)])


def _parallel_seeds(task: EnumerationTask, seeds):
    from concurrent.futures import ProcessPoolExecutor
    from dataclasses import asdict

    options_dict = asdict(task.options)
    options_dict["jobs"] = 1
    args = [(task.group.to_json_dict(), list(task.subgroup.members),
             task.target.as_tuple(), options_dict, list(seed))
            for seed in seeds]
    results: list[int] = []
    stats: dict = {}
    exhaustive = True
    with ProcessPoolExecutor(max_workers=task.options.jobs) as pool:
        for part_results, part_stats, part_exhaustive in pool.map(
                _seed_worker, args):
            results.extend(part_results)
            exhaustive = exhaustive and part_exhaustive
            for key, val in part_stats.items():
                if isinstance(val, int):
                    stats[key] = stats.get(key, 0) + val
    return exhaustive, results, stats


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


class CensusAccumulator:
    """Groups connection sets into isomorphism classes.

    Graphs are bucketed by a cheap invariant, matched against class
    representatives by the exact pairwise test, and each class gets one
    canonical certificate.  Certificates are what cross-group merging
    keys on, so they are computed once per class.
    """

    def __init__(self, options: EnumerationOptions):
        self.options = options
        self._classes: list[dict] = []

    def add(self, g: FiniteGroup, h: Subgroup, t_set, params: NeumaierParams):
        connection = frozenset(t_set) | (h.member_set - {0})
        graph = materialize(CayleyGraph(g, connection))
        key = invariant_key(graph)
        for cls in self._classes:
            if cls["key"] != key:
                continue
            try:
                same = are_isomorphic(cls["graph"], graph,
                                      node_cap=self.options.iso_cap)
            except IsoUndecided:
                same = cls["certificate"] == canonical_form(
                    graph, node_budget=self.options.canon_budget)
            if same:
                cls["multiplicity"] += 1
                return
        cert = canonical_form(graph, node_budget=self.options.canon_budget)
        try:
            strongly_regular(graph)
            strict = False
        except (NotRegularError, NotEdgeRegularError, NotSrgError):
            strict = True
        self._classes.append({
            "key": key,
            "graph": graph,
            "certificate": cert,
            "multiplicity": 1,
            "group": g.descriptor,
            "subgroup": h.members,
            "representative": tuple(sorted(t_set)),
            "params": params,
            "strict": strict,
        })

    def classes(self) -> list[CensusClass]:
        ordered = sorted(self._classes, key=lambda c: c["certificate"])
        return [CensusClass(c["certificate"].hex(), c["multiplicity"],
                            c["group"], c["subgroup"], c["representative"],
                            c["params"], c["strict"])
                for c in ordered]


def _build_result(task: EnumerationTask, raw_masks, stats, exhaustive,
                  elapsed: float) -> EnumerationResult:
    g, h = task.group, task.subgroup
    t_tuples = [_mask_to_tuple(m) for m in raw_masks]
    if task.options.verify_each:
        for t in t_tuples:
            s = frozenset(t) | (h.member_set - {0})
            report = theorem1_check(g, h, s)
            if not report.ok or report.params != task.target:
                raise AssertionError(
                    f"enumerated set failed re-verification: {t}")
            check = strictly_neumaier_check(CayleyGraph(g, s), h)
            if not check.neumaier or check.params != task.target:
                raise AssertionError(
                    f"enumerated set failed the graph-level check: {t}")
    classes: list[CensusClass] = []
    strict_count = 0
    if task.options.dedupe == "certificate":
        acc = CensusAccumulator(task.options)
        for t in t_tuples:
            acc.add(g, h, t, task.target)
        classes = acc.classes()
        strict_count = sum(1 for c in classes if c.strict)
    stats = dict(stats)
    stats["wall_time"] = elapsed
    return EnumerationResult(
        group=g.descriptor,
        subgroup=h.members,
        target=task.target,
        connection_sets=t_tuples if task.options.collect_sets else [],
        classes=classes,
        counts={"raw": len(t_tuples), "classes": len(classes),
                "strict": strict_count},
        stats=stats,
        exhaustive=exhaustive,
    )


def enumerate_graphs(task: EnumerationTask) -> EnumerationResult:
    """All Neumaier Cayley graphs over (G, H) with the target parameters.

    Sound: every output passes the criterion re-check.  Complete: every
    such graph over G is isomorphic to an output (orbit seeding discards
    only subtrees reachable by an automorphism fixing the second coset).
    A tripped node budget is reported by ``exhaustive=False``.
    """
    start = time.monotonic()
    raw, stats, exhaustive = _search_raw(task)
    return _build_result(task, raw, stats, exhaustive,
                         time.monotonic() - start)


def brute_enumerate(task: EnumerationTask) -> EnumerationResult:
    """Oracle: filter every ((n-1)m)-subset of G \\ H directly.

    No automorphism reduction, no forcing; feasible only when
    C(|G|-|H|, (n-1)m) stays under the cap.  Used to validate the
    completeness of the reduced search on small instances.
    """
    start = time.monotonic()
    g, h = task.group, task.subgroup
    target = task.target
    n = g.order // len(h)
    size = (n - 1) * target.m
    pool = [x for x in range(g.order) if x not in h.member_set]
    total = comb(len(pool), size)
    if total > task.options.brute_cap:
        raise SearchSpaceTooLarge(
            f"C({len(pool)},{size}) = {total} exceeds cap")
    search = _CosetSearch(g, h, target, replace(task.options,
                                                strong_prune=False))
    cosets = right_cosets(g, h)
    coset_masks = [search._mask(cs) for cs in cosets.cosets]
    raw = []
    checked = 0
    for combo in itertools.combinations(pool, size):
        checked += 1
        mask = 0
        for x in combo:
            mask |= 1 << x
        if search._inv_mask(mask) != mask:
            continue
        if any((mask & cm).bit_count() != target.m for cm in coset_masks[1:]):
            continue
        ok = True
        for hh in h.members[1:]:
            if (search._right_mul(mask, hh) & mask).bit_count() != search.t2:
                ok = False
                break
        if ok:
            for t in search._bits(mask):
                if (search._right_mul(mask, t) & mask).bit_count() != search.t3:
                    ok = False
                    break
        if ok:
            raw.append(mask)
    stats = {"nodes": checked, "seeds": 0, "stabilizer": "none"}
    return _build_result(task, raw, stats, True, time.monotonic() - start)


def merge_censuses(results) -> list[CensusClass]:
    """Merge class lists from several runs by canonical certificate."""
    merged: dict[str, CensusClass] = {}
    for res in results:
        for cls in res.classes:
            prev = merged.get(cls.certificate)
            if prev is None:
                merged[cls.certificate] = cls
            else:
                merged[cls.certificate] = CensusClass(
                    prev.certificate,
                    prev.multiplicity + cls.multiplicity,
                    prev.group, prev.subgroup, prev.representative,
                    prev.params, prev.strict)
    return [merged[k] for k in sorted(merged)]


def subgroup_sweep(g: FiniteGroup, target: NeumaierParams,
                   options: EnumerationOptions | None = None,
                   subgroups: list[Subgroup] | None = None
                   ) -> tuple[list[EnumerationResult], list[CensusClass]]:
    """Enumerate over every order-s subgroup (up to Aut(G)-conjugacy when
    the automorphism group is listable) and merge the censuses."""
    from .groups import subgroups_of_order

    options = options or EnumerationOptions()
    if subgroups is None:
        subgroups = subgroups_of_order(g, target.s)
        subgroups = _conjugacy_reduce(g, subgroups, options)
    results = []
    for h in subgroups:
        task = EnumerationTask(g, h, target, options)
        results.append(enumerate_graphs(task))
    return results, merge_censuses(results)


def _conjugacy_reduce(g: FiniteGroup, subgroups, options):
    """Keep one subgroup per Aut(G)-orbit; conjugate subgroups yield
    identical censuses up to isomorphism."""
    try:
        auts = automorphism_group(g, budget=options.aut_budget)
    except AutBudgetExceeded:
        return subgroups
    seen: set[frozenset[int]] = set()
    keep = []
    for h in subgroups:
        key = h.member_set
        if key in seen:
            continue
        keep.append(h)
        orbit = {key}
        frontier = [key]
        while frontier:
            cur = frontier.pop()
            for a in auts:
                img = a.apply_set(cur)
                if img not in orbit:
                    orbit.add(img)
                    frontier.append(img)
        seen |= orbit
    return keep
