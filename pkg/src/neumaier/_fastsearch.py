"""JIT-compiled backend for the coset enumeration search.

Same algorithm as the pure-Python `_CosetSearch`, but every per-coset
subset is an s-bit local mask and right-multiplication / inversion act
through precomputed mask-transform tables, so the inner loop is table
lookups, ANDs, and popcounts.  Eligible when the group is small enough
for the tables (v <= 64, s <= 12); results and traversal order are
identical to the reference implementation.
"""
from __future__ import annotations

import numpy as np

from .groups import FiniteGroup, Subgroup, right_cosets

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap(args[0]) if args and callable(args[0]) else wrap


MAX_TABLE_ENTRIES = 8_000_000


def eligible(g: FiniteGroup, h: Subgroup) -> bool:
    if not HAVE_NUMBA:
        return False
    v, s = g.order, len(h)
    n = v // s
    return v <= 64 and s <= 12 and v * n * (1 << s) <= MAX_TABLE_ENTRIES


class FastContext:
    """Precomputed tables shared by all seeds of one task."""

    def __init__(self, g: FiniteGroup, h: Subgroup, m: int, t2: int, t3: int):
        v, s = g.order, len(h)
        n = v // s
        self.g, self.h = g, h
        self.v, self.s, self.n, self.m = v, s, n, m
        self.t2, self.t3 = t2, t3
        cosets = right_cosets(g, h)
        self.cosets = cosets
        size = 1 << s
        elems = np.zeros((n, s), dtype=np.int64)
        coset_of = np.zeros(v, dtype=np.int64)
        local_of = np.zeros(v, dtype=np.int64)
        for a, cs in enumerate(cosets.cosets):
            for i, x in enumerate(cs):
                elems[a, i] = x
                coset_of[x] = a
                local_of[x] = i
        mul, inv = g.mul, g.inv

        # right-multiplication transform: X |-> X*y maps coset a into one coset
        rm_target = np.zeros((v, n), dtype=np.int64)
        rm_table = np.zeros((v, n, size), dtype=np.int64)
        for y in range(v):
            for a in range(n):
                imgs = [mul[int(elems[a, i])][y] for i in range(s)]
                b = coset_of[imgs[0]]
                rm_target[y, a] = b
                bit = [1 << int(local_of[img]) for img in imgs]
                tab = rm_table[y, a]
                for mask in range(1, size):
                    low = mask & -mask
                    tab[mask] = tab[mask ^ low] | bit[low.bit_length() - 1]

        # inversion scatters one coset over several: per (a, b) table
        inv_table = np.zeros((n, n, size), dtype=np.int64)
        for a in range(n):
            bit_to = [(int(coset_of[inv[int(elems[a, i])]]),
                       1 << int(local_of[inv[int(elems[a, i])]]))
                      for i in range(s)]
            for b in range(n):
                tab = inv_table[a, b]
                bits = [img if tb == b else 0 for tb, img in bit_to]
                for mask in range(1, size):
                    low = mask & -mask
                    tab[mask] = tab[mask ^ low] | bits[low.bit_length() - 1]

        # schedules for the partial-sum pruning
        hs = list(h.members[1:])
        reps = cosets.reps
        pairs2 = []            # (h_elem, a) completing at depth max(a, b)
        for hh in hs:
            for a in range(1, n):
                b = int(rm_target[hh, a])
                pairs2.append((max(a, b), hh, a))
        pairs2.sort()
        p2_depth_start = np.zeros(n + 1, dtype=np.int64)
        p2_h = np.zeros(len(pairs2), dtype=np.int64)
        p2_a = np.zeros(len(pairs2), dtype=np.int64)
        for idx, (d, hh, a) in enumerate(pairs2):
            p2_h[idx] = hh
            p2_a[idx] = a
        for d in range(n + 1):
            p2_depth_start[d] = sum(1 for dd, _, _ in pairs2 if dd < d)
        h_index = {hh: i for i, hh in enumerate(hs)}
        p2_hidx = np.array([h_index[int(hh)] for hh in p2_h], dtype=np.int64)

        sigma3 = np.zeros((v, n), dtype=np.int64)
        for y in range(v):
            for a in range(n):
                sigma3[y, a] = coset_of[mul[reps[a]][y]]
        # per (g, depth): which a-pairs complete exactly at that depth
        pairs3_at = np.full((v, n, n), -1, dtype=np.int64)
        for y in range(v):
            counts = [0] * n
            for a in range(1, n):
                b = int(sigma3[y, a])
                d = max(a, b) if b != 0 else a
                pairs3_at[y, d, counts[d]] = a
                counts[d] += 1

        self.elems = elems
        self.rm_target = rm_target
        self.rm_table = rm_table
        self.inv_table = inv_table
        self.h_elems = np.array(hs, dtype=np.int64)
        self.p2_depth_start = p2_depth_start
        self.p2_h = p2_h
        self.p2_a = p2_a
        self.p2_hidx = p2_hidx
        self.sigma3 = sigma3
        self.pairs3_at = pairs3_at
        self.popc = np.array([bin(x).count("1") for x in range(size)],
                             dtype=np.int64)

    def local_mask(self, elements, coset_idx: int) -> int:
        cs = list(self.cosets.cosets[coset_idx])
        mask = 0
        for x in elements:
            mask |= 1 << cs.index(x)
        return mask

    def to_global(self, chosen_row) -> int:
        mask = 0
        for a in range(1, self.n):
            local = int(chosen_row[a])
            while local:
                low = local & -local
                mask |= 1 << int(self.elems[a, low.bit_length() - 1])
                local ^= low
        return mask

    def run_seed(self, seed_elements, strong: bool, budget: int,
                 max_out: int = 250_000):
        seed_mask = self.local_mask(seed_elements, 1)
        out = np.zeros((max_out, self.n), dtype=np.int64)
        stats = np.zeros(8, dtype=np.int64)
        found, completed = _dfs(
            self.n, self.s, self.m, self.t2, self.t3,
            self.elems, self.rm_target, self.rm_table, self.inv_table,
            self.h_elems, self.p2_depth_start, self.p2_hidx, self.p2_a,
            self.sigma3, self.pairs3_at, self.popc,
            seed_mask, strong, budget, out, stats)
        masks = [self.to_global(out[i]) for i in range(found)]
        stat_dict = {
            "nodes": int(stats[0]), "prune_forced": int(stats[1]),
            "prune_inverse": int(stats[2]), "prune_partial2": int(stats[3]),
            "prune_partial3": int(stats[4]), "leaves": int(stats[5]),
            "found": int(stats[6]),
        }
        return masks, stat_dict, bool(completed)


@njit(cache=True)
def _dfs(n, s, m, t2, t3, elems, rm_target, rm_table, inv_table,
         h_elems, p2_depth_start, p2_hidx, p2_a, sigma3, pairs3_at, popc,
         seed_mask, strong, budget, out, stats):
    full = np.int64((1 << s) - 1)
    nh = len(h_elems)
    max_active = (n - 1) * m

    chosen = np.zeros(n, dtype=np.int64)
    forced = np.zeros(n, dtype=np.int64)
    forced_save = np.zeros((n, n), dtype=np.int64)
    cnt2 = np.zeros(nh, dtype=np.int64)
    done2 = np.zeros(nh, dtype=np.int64)
    cnt2_save = np.zeros((n, nh), dtype=np.int64)
    done2_save = np.zeros((n, nh), dtype=np.int64)
    active_g = np.zeros(max_active + m, dtype=np.int64)
    cnt3 = np.zeros(max_active + m, dtype=np.int64)
    done3 = np.zeros(max_active + m, dtype=np.int64)
    n_active = 0
    n_active_save = np.zeros(n, dtype=np.int64)
    cnt3_save = np.zeros((n, max_active + m), dtype=np.int64)
    done3_save = np.zeros((n, max_active + m), dtype=np.int64)

    free_pos = np.zeros((n, s), dtype=np.int64)
    free_len = np.zeros(n, dtype=np.int64)
    comb_idx = np.zeros((n, s), dtype=np.int64)
    comb_k = np.zeros(n, dtype=np.int64)
    cand_state = np.zeros(n, dtype=np.int64)  # 0: fresh, 1: iterating

    nodes = np.int64(0)
    found = 0
    completed = True

    # ---- seed (depth 1) -------------------------------------------------
    nodes += 1
    ti = seed_mask
    ok = True
    # inverse-consistency for the seed itself
    for b in range(1, n):
        bits = inv_table[1, b, ti]
        if b == 1:
            if bits & ~ti:
                stats[2] += 1
                ok = False
                break
        elif bits:
            forced[b] |= bits
    if ok:
        chosen[1] = ti
        if strong:
            # pairs completing at depth 1 for condition (2)
            for idx in range(p2_depth_start[1], p2_depth_start[2]):
                hh = h_elems[p2_hidx[idx]]
                a = p2_a[idx]
                b = rm_target[hh, a]
                cnt2[p2_hidx[idx]] += popc[rm_table[hh, a, chosen[a]]
                                           & chosen[b]]
                done2[p2_hidx[idx]] += 1
            # new condition-(3) constraints from the seed elements
            local = ti
            while local:
                low = local & (-local)
                g_elem = elems[1, _bl(low) - 1]
                cntv = 0
                dv = 0
                for a in range(1, n):
                    b3 = sigma3[g_elem, a]
                    dd = max(a, b3) if b3 != 0 else a
                    if dd <= 1:
                        if b3 != 0:
                            cntv += popc[rm_table[g_elem, a, chosen[a]]
                                         & chosen[b3]]
                        dv += 1
                active_g[n_active] = g_elem
                cnt3[n_active] = cntv
                done3[n_active] = dv
                n_active += 1
                local ^= low
            if not _bounds_ok(cnt2, done2, cnt3, done3, n_active, n, m,
                              t2, t3, stats):
                ok = False

    if ok:
        depth = 2
        cand_state[2] = 0
        while depth >= 2:
            if depth == n:
                # leaf: full validation through the tables
                stats[5] += 1
                good = True
                for hi in range(nh):
                    hh = h_elems[hi]
                    tot = 0
                    for a in range(1, n):
                        b = rm_target[hh, a]
                        tot += popc[rm_table[hh, a, chosen[a]] & chosen[b]]
                    if tot != t2:
                        good = False
                        break
                if good:
                    for a in range(1, n):
                        local = chosen[a]
                        while local and good:
                            low = local & (-local)
                            g_elem = elems[a, _bl(low) - 1]
                            tot = 0
                            for aa in range(1, n):
                                b3 = sigma3[g_elem, aa]
                                if b3 != 0:
                                    tot += popc[rm_table[g_elem, aa,
                                                         chosen[aa]]
                                                & chosen[b3]]
                            if tot != t3:
                                good = False
                            local ^= low
                        if not good:
                            break
                if good:
                    stats[6] += 1
                    if found < out.shape[0]:
                        for a in range(n):
                            out[found, a] = chosen[a]
                        found += 1
                    else:
                        completed = False
                        break
                depth -= 1
                continue

            if cand_state[depth] == 0:
                # entering this depth: snapshot state, set up combinations
                fmask = forced[depth]
                nf = popc[fmask]
                if nf > m:
                    stats[1] += 1
                    depth -= 1
                    continue
                k = m - nf
                cnt = 0
                for i in range(s):
                    if not (fmask >> i) & 1:
                        free_pos[depth, cnt] = i
                        cnt += 1
                free_len[depth] = cnt
                comb_k[depth] = k
                if k > cnt:
                    depth -= 1
                    continue
                forced_save[depth] = forced
                if strong:
                    cnt2_save[depth] = cnt2
                    done2_save[depth] = done2
                    n_active_save[depth] = n_active
                    for j in range(n_active):
                        cnt3_save[depth, j] = cnt3[j]
                        done3_save[depth, j] = done3[j]
                for j in range(k):
                    comb_idx[depth, j] = j
                cand_state[depth] = 1
            else:
                # undo the previous candidate, then advance the combination
                forced[:] = forced_save[depth]
                if strong:
                    cnt2[:] = cnt2_save[depth]
                    done2[:] = done2_save[depth]
                    n_active = n_active_save[depth]
                    for j in range(n_active):
                        cnt3[j] = cnt3_save[depth, j]
                        done3[j] = done3_save[depth, j]
                chosen[depth] = 0
                k = comb_k[depth]
                exhausted = False
                if k == 0:
                    exhausted = True
                else:
                    j = k - 1
                    while j >= 0 and comb_idx[depth, j] == \
                            free_len[depth] - k + j:
                        j -= 1
                    if j < 0:
                        exhausted = True
                    else:
                        comb_idx[depth, j] += 1
                        for jj in range(j + 1, k):
                            comb_idx[depth, jj] = comb_idx[depth, jj - 1] + 1
                if exhausted:
                    cand_state[depth] = 0
                    depth -= 1
                    continue

            # build the candidate; dirt is cleaned by the undo step above
            nodes += 1
            if nodes > budget:
                completed = False
                break
            ti = forced_save[depth, depth]
            for j in range(comb_k[depth]):
                ti |= 1 << free_pos[depth, comb_idx[depth, j]]

            # inverse-consistency + scatter into future cosets
            ok = True
            for b in range(1, n):
                bits = inv_table[depth, b, ti]
                if bits == 0:
                    continue
                if b < depth:
                    if bits & ~chosen[b]:
                        ok = False
                        break
                elif b == depth:
                    if bits & ~ti:
                        ok = False
                        break
                else:
                    forced[b] |= bits
            if not ok:
                stats[2] += 1
                continue

            chosen[depth] = ti
            if strong:
                ok = _strong_update(depth, chosen, cnt2, done2, active_g,
                                    cnt3, done3, n_active, n, m, t2, t3,
                                    elems, rm_target, rm_table, sigma3,
                                    pairs3_at, popc, h_elems,
                                    p2_depth_start, p2_hidx, p2_a, stats)
                if ok:
                    # register the new elements of this coset
                    local = ti
                    new_active = n_active
                    while local:
                        low = local & (-local)
                        g_elem = elems[depth, _bl(low) - 1]
                        cntv = 0
                        dv = 0
                        for a in range(1, n):
                            b3 = sigma3[g_elem, a]
                            dd = max(a, b3) if b3 != 0 else a
                            if dd <= depth:
                                if b3 != 0:
                                    cntv += popc[rm_table[g_elem, a,
                                                          chosen[a]]
                                                 & chosen[b3]]
                                dv += 1
                        active_g[new_active] = g_elem
                        cnt3[new_active] = cntv
                        done3[new_active] = dv
                        new_active += 1
                        local ^= low
                    n_active = new_active
                    ok = _bounds_ok(cnt2, done2, cnt3, done3, n_active,
                                    n, m, t2, t3, stats)
                if not ok:
                    continue

            # descend
            depth += 1
            if depth < n:
                cand_state[depth] = 0

        # unwind after budget stop leaves state dirty; nothing to clean
    stats[0] = nodes
    return found, completed


@njit(cache=True)
def _bl(x):
    """bit_length for a positive uint16."""
    r = 0
    while x:
        x >>= 1
        r += 1
    return r


@njit(cache=True)
def _bounds_ok(cnt2, done2, cnt3, done3, n_active, n, m, t2, t3, stats):
    total_pairs = n - 1
    for i in range(len(cnt2)):
        if cnt2[i] > t2 or cnt2[i] + m * (total_pairs - done2[i]) < t2:
            stats[3] += 1
            return False
    for j in range(n_active):
        if cnt3[j] > t3 or cnt3[j] + m * (total_pairs - done3[j]) < t3:
            stats[4] += 1
            return False
    return True


@njit(cache=True)
def _strong_update(depth, chosen, cnt2, done2, active_g, cnt3, done3,
                   n_active, n, m, t2, t3, elems, rm_target, rm_table,
                   sigma3, pairs3_at, popc, h_elems, p2_depth_start,
                   p2_hidx, p2_a, stats):
    # condition-(2) pairs completing at this depth
    for idx in range(p2_depth_start[depth], p2_depth_start[depth + 1]):
        hh = h_elems[p2_hidx[idx]]
        a = p2_a[idx]
        b = rm_target[hh, a]
        cnt2[p2_hidx[idx]] += popc[rm_table[hh, a, chosen[a]] & chosen[b]]
        done2[p2_hidx[idx]] += 1
        if cnt2[p2_hidx[idx]] > t2:
            stats[3] += 1
            return False
    # condition-(3) pairs completing at this depth for existing elements
    for j in range(n_active):
        g_elem = active_g[j]
        for slot in range(n):
            a = pairs3_at[g_elem, depth, slot]
            if a < 0:
                break
            b3 = sigma3[g_elem, a]
            if b3 != 0:
                cnt3[j] += popc[rm_table[g_elem, a, chosen[a]] & chosen[b3]]
            done3[j] += 1
            if cnt3[j] > t3:
                stats[4] += 1
                return False
    return True
