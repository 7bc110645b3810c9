"""Seeded backtracking engines for the computer-found objects.

Three searchers, all deterministic for a fixed seed (the default is no
randomization at all: blocks in input order, candidate values in canonical
element order).  Budgets are counted in search-tree nodes, so NOT_FOUND is
a meaningful answer; results additionally say whether the space was
exhausted.  Every success is re-verified through the corresponding
verifier module before it is returned - the searcher's internal
feasibility logic is never the final authority.

find_brdf runs in two phases.  Difference-multiset conditions are
translation- and negation-invariant per block, so the block covering the
smallest uncovered difference class can be normalized to contain {0, d};
a second phase re-translates the normalized blocks to meet the positional
Banff conditions (blocks plus negatives pairwise disjoint and clear of the
forbidden points).  Exhausting both phases proves nonexistence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

from .designs import Design, DesignError, sort_block
from .families import DifferenceFamily, family, short_orbit_subgroup, verify_family
from .groups import FiniteGroup, make_group, subgroup, trivial_subgroup
from .nestings import Nesting, verify_nesting

DEFAULT_BRDF_BUDGET = 10**8
DEFAULT_NESTING_BUDGET = 10**6
DEFAULT_TUPLE_BUDGET = 10**8


@dataclass
class SearchResult:
    found: object | None
    nodes: int
    exhausted: bool

    @property
    def ok(self) -> bool:
        return self.found is not None


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def tick(self) -> bool:
        self.left -= 1
        return self.left >= 0


# ---------------------------------------------------------------------------
# nested points for cyclic base blocks


def find_base_nesting(
    v: int,
    base_blocks: list[list[int]],
    short_orbit: bool = False,
    budget: int = DEFAULT_NESTING_BUDGET,
    seed: int | None = None,
) -> SearchResult:
    """Assign a nested point to every base block of a cyclic design.

    With short_orbit=True the last block must be {0, v/4, v/2, 3v/4} and
    only its first v/4 translates are taken.  Feasibility per assignment is
    the published difference test: the 2k values +-(B - n), pooled over all
    blocks, are pairwise distinct and avoid 0 and v/2.  The induced full
    nesting is verified before returning.
    """
    g = make_group(f"Z{v}")
    blocks = [sort_block(b) for b in base_blocks]
    k = len(blocks[0]) if blocks else 0
    if any(len(b) != k for b in blocks):
        raise DesignError("blocks must share one size")
    if k < 3:  # k >= 2*lambda + 1 is necessary for any nesting
        return SearchResult(None, 0, True)
    if short_orbit and set(blocks[-1]) != {0, v // 4, v // 2, 3 * v // 4}:
        raise DesignError("short-orbit flag requires the order-4 subgroup as last block")

    base_design = _cyclic_design(g, blocks, short_orbit)
    from .designs import verify_bibd

    base_report = verify_bibd(base_design, v, k, 1)
    if not base_report.ok:
        raise DesignError(f"base blocks do not generate a (v,{k},1) design: "
                          f"{base_report.first_problem()}")

    half = v // 2 if v % 2 == 0 else None
    orders = _value_orders(len(blocks), list(range(v)), seed)
    budget_box = _Budget(budget)
    used: set[int] = set()
    chosen: list[int] = []

    def deltas(bi: int, n: int) -> list[int] | None:
        out = []
        seen = set()
        for p in blocks[bi]:
            for d in ((p - n) % v, (n - p) % v):
                if d == 0 or d == half or d in seen or d in used:
                    return None
                seen.add(d)
                out.append(d)
        return out

    def dfs(bi: int) -> bool:
        if bi == len(blocks):
            return True
        for n in orders[bi]:
            if not budget_box.tick():
                return False
            ds = deltas(bi, n)
            if ds is None:
                continue
            used.update(ds)
            chosen.append(n)
            if dfs(bi + 1):
                return True
            chosen.pop()
            used.difference_update(ds)
        return False

    ok = dfs(0)
    if not ok:
        return SearchResult(None, budget - max(budget_box.left, 0), budget_box.left >= 0)
    nesting = _cyclic_nesting(g, blocks, chosen, short_orbit)
    report = verify_nesting(nesting, 1)
    if not report.ok:  # the incremental test is equivalent; treat as a bug
        raise DesignError(f"search result failed verification: {report.first_problem()}")
    return SearchResult({"nested_points": list(chosen), "nesting": nesting},
                        budget - max(budget_box.left, 0), False)


def _cyclic_design(g: FiniteGroup, blocks, short_orbit: bool):
    v = g.order
    all_blocks = []
    for bi, blk in enumerate(blocks):
        count = v // 4 if (short_orbit and bi == len(blocks) - 1) else v
        for t in range(count):
            all_blocks.append(sort_block((p + t) % v for p in blk))
    if len(set(all_blocks)) != len(all_blocks):
        raise DesignError("duplicate translates; check the short-orbit flag")
    return Design(tuple(range(v)), tuple(all_blocks))


def _cyclic_nesting(g: FiniteGroup, blocks, nested: list[int], short_orbit: bool) -> Nesting:
    v = g.order
    out_blocks = []
    phi = []
    for bi, blk in enumerate(blocks):
        count = v // 4 if (short_orbit and bi == len(blocks) - 1) else v
        for t in range(count):
            out_blocks.append(sort_block((p + t) % v for p in blk))
            phi.append((nested[bi] + t) % v)
    order = sorted(range(len(out_blocks)), key=lambda i: out_blocks[i] + (phi[i],))
    base = Design(tuple(range(v)), tuple(out_blocks[i] for i in order))
    return Nesting(base, tuple(phi[i] for i in order))


def _value_orders(n: int, values: list, seed: int | None) -> list[list]:
    if seed is None:
        return [list(values) for _ in range(n)]
    rng = random.Random(seed)
    return [rng.sample(values, len(values)) for _ in range(n)]


# ---------------------------------------------------------------------------
# difference families


def find_brdf(
    group: FiniteGroup | str,
    h_elements,
    k: int = 4,
    lam: int = 1,
    weak: bool = False,
    budget: int = DEFAULT_BRDF_BUDGET,
    seed: int | None = None,
) -> SearchResult:
    """Search for a (G,H,k,1)-BRDF (or weak BRDF over the order-4 subgroup).

    Phase 1 partitions the difference classes of G minus H into normalized
    blocks containing {0, d}; phase 2 re-translates each block so blocks
    and negatives are pairwise disjoint and avoid the forbidden points (H
    for the strict axioms, {0, v/2} for the weak ones).  The emitted
    family is verified before returning.
    """
    g = make_group(group) if isinstance(group, str) else group
    if lam != 1:
        raise DesignError("search supports lambda = 1 (verification handles any lambda)")
    h = subgroup(g, h_elements) if h_elements else trivial_subgroup(g)
    if weak:
        expected = short_orbit_subgroup(g)
        if h.elements != expected.elements:
            raise DesignError("weak search needs H = {0, v/4, v/2, 3v/4}")
    n_free = g.order - h.order
    if n_free % (k * (k - 1)) != 0:
        raise DesignError(f"|G|-|H| = {n_free} is not divisible by k(k-1) = {k * (k - 1)}")

    if not weak and h.order == 1 and k == 4 and g.order % 12 == 1:
        fast = _scaled_orbit_family(g, budget)
        if fast is not None:
            return fast

    elems = g.elements()
    n = len(elems)
    index = {e: i for i, e in enumerate(elems)}
    neg = [index[g.neg(e)] for e in elems]
    if len(g.factors) > 1:
        add = [[index[g.add(elems[a], elems[b])] for b in range(n)] for a in range(n)]
        sub = [[index[g.sub(elems[a], elems[b])] for b in range(n)] for a in range(n)]
        diff = lambda a, b: sub[a][b]
        addf = lambda a, b: add[a][b]
    else:
        v = g.order
        diff = lambda a, b: (a - b) % v
        addf = lambda a, b: (a + b) % v
    h_idx = {index[e] for e in h.elements}
    zero = index[g.zero()]

    for i in range(n):
        if neg[i] == i and i not in h_idx and i != zero:
            return SearchResult(None, 0, True)  # order-2 element outside H

    # difference classes {d, -d} over G \ H
    cls_of = [-1] * n
    reps: list[int] = []
    for i in range(n):
        if i in h_idx or i == zero or cls_of[i] >= 0:
            continue
        cls_of[i] = cls_of[neg[i]] = len(reps)
        reps.append(i)
    n_classes = len(reps)
    n_blocks = n_classes // comb(k, 2)
    if weak:
        forbidden = frozenset((index[0], index[g.order // 2]))
    else:
        forbidden = frozenset(h_idx)

    budget_box = _Budget(budget)
    state = _BrdfState(n, k, n_blocks, reps, cls_of, diff, addf, neg, zero, forbidden)

    # bounded exhaustive pass: proves nonexistence on small instances
    outcome = state.solve(budget_box, cap=min(budget, 200_000),
                          order=list(range(n)), cls_order=list(range(n_classes)))
    if outcome == "found":
        return _brdf_result(g, h, elems, state, weak, budget, budget_box)
    if outcome == "exhausted":
        return SearchResult(None, budget - max(budget_box.left, 0), True)

    # randomized restarts on a fixed Luby schedule; output is still a pure
    # function of (input, seed, budget)
    rng = random.Random(seed if seed is not None else 0)
    restart = 0
    while budget_box.left > 0:
        order = list(range(n))
        rng.shuffle(order)
        cls_order = list(range(n_classes))
        rng.shuffle(cls_order)
        cap = 20_000 * _luby(restart)
        restart += 1
        outcome = state.solve(budget_box, cap=cap, order=order, cls_order=cls_order)
        if outcome == "found":
            return _brdf_result(g, h, elems, state, weak, budget, budget_box)
        if outcome == "exhausted":
            return SearchResult(None, budget - max(budget_box.left, 0), True)
    return SearchResult(None, budget, False)


def _luby(i: int) -> int:
    """Luby restart sequence 1,1,2,1,1,2,4,... (i is 0-based)."""
    i += 1
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i = i - (1 << (k - 1)) + 1


class _BrdfState:
    """One normalized-block search space, reusable across restarts."""

    def __init__(self, n, k, n_blocks, reps, cls_of, diff, addf, neg, zero, forbidden):
        self.n = n
        self.k = k
        self.n_blocks = n_blocks
        self.reps = reps
        self.cls_of = cls_of
        self.diff = diff
        self.addf = addf
        self.neg = neg
        self.zero = zero
        self.forbidden = forbidden
        self.norm_blocks: list[tuple[int, ...]] = []
        self.translates: list[int] = []

    def solve(self, budget_box: _Budget, cap: int, order: list[int],
              cls_order: list[int]) -> str:
        """Run one pass with its own node cap: 'found' | 'exhausted' | 'cap'."""
        self.norm_blocks = []
        self.translates = []
        self.covered = 0
        self.order = order
        self.cls_order = cls_order
        self.cap_box = _Budget(min(cap, max(budget_box.left, 0)))
        self.budget_box = budget_box
        full = (1 << len(self.reps)) - 1 if self.reps else 0
        try:
            found = self._phase1(full)
        except _OutOfNodes:
            return "cap" if budget_box.left > 0 else "budget"
        return "found" if found else "exhausted"

    def _tick(self) -> None:
        self.budget_box.tick()
        if not self.cap_box.tick() or self.budget_box.left < 0:
            raise _OutOfNodes

    def _phase1(self, full: int) -> bool:
        if self.covered == full:
            return self._phase2()
        covered = self.covered
        c = next(ci for ci in self.cls_order if not (covered >> ci) & 1)
        d = self.reps[c]
        return self._extend([self.zero, d], 1 << c)

    def _extend(self, pts: list[int], bits: int) -> bool:
        if len(pts) == self.k:
            self.covered |= bits
            self.norm_blocks.append(tuple(pts))
            full = (1 << len(self.reps)) - 1
            if self._phase1(full):
                return True
            self.norm_blocks.pop()
            self.covered &= ~bits
            return False
        cls_of, diff, covered = self.cls_of, self.diff, self.covered
        skip_before = None if len(pts) == 2 else pts[-1]
        started = skip_before is None
        for y in self.order:
            if not started:  # dedupe the unordered last pair in this pass's order
                if y == skip_before:
                    started = True
                continue
            self._tick()
            if y in pts:
                continue
            acc = bits
            ok = True
            for p in pts:
                ci = cls_of[diff(y, p)]
                if ci < 0:
                    ok = False
                    break
                bit = 1 << ci
                if (covered | acc) & bit:
                    ok = False
                    break
                acc |= bit
            if not ok:
                continue
            if self._extend(pts + [y], acc):
                return True
        return False

    def _phase2(self) -> bool:
        used: set[int] = set()
        placed: list[int] = []
        addf, neg, forbidden = self.addf, self.neg, self.forbidden

        def place(bi: int) -> bool:
            if bi == self.n_blocks:
                return True
            blk = self.norm_blocks[bi]
            for t in self.order:
                self._tick()
                pts = []
                ok = True
                for p in blk:
                    a = addf(p, t)
                    b = neg[a]
                    if (a in forbidden or b in forbidden or a == b
                            or a in used or b in used or a in pts or b in pts):
                        ok = False
                        break
                    pts.append(a)
                    pts.append(b)
                if not ok:
                    continue
                used.update(pts)
                placed.append(t)
                if place(bi + 1):
                    return True
                placed.pop()
                used.difference_update(pts)
            return False

        if place(0):
            self.translates = list(placed)
            return True
        return False


class _OutOfNodes(Exception):
    pass


def _scaled_orbit_family(g: FiniteGroup, budget: int) -> SearchResult | None:
    """Fast path over a field of order q = 1 mod 12: find one 4-set whose six
    difference classes represent the six cosets of the sixth powers C^6
    exactly once and whose entries lie in four distinct cosets, then scale
    it by coset representatives of {1,-1} in C^6.

    Scaling tiles both the difference classes (so the family is an RDF) and
    the block entries (so blocks plus negatives are disjoint unions of full
    cosets).  Returns None when the group has no field structure to use.
    """
    from .groups import FiniteField, coset_of, factorize, index6_cosets

    if len(g.factors) != 1:
        return None
    fac = factorize(g.order)
    if len(fac) != 1:
        return None
    (p, d), = fac.items()
    if d > 1 and not g.factors[0].is_field:
        return None
    fld = g.factors[0] if g.factors[0].is_field else FiniteField(p, 1)
    q = fld.q
    _, cosets = index6_cosets(fld)
    coset_id = [0] * q
    for u in range(1, q):
        coset_id[u] = coset_of(u, cosets)

    budget_box = _Budget(budget)

    def extend(pts: list[int], entry_cosets: set[int], diff_cosets: set[int]):
        if len(pts) == 4:
            return list(pts)
        start = pts[-1] + 1 if pts else 1
        for y in range(start, q):
            if not budget_box.tick():
                raise _OutOfNodes
            cy = coset_id[y]
            if cy in entry_cosets:
                continue
            new = set()
            ok = True
            for x in pts:
                cd = coset_id[fld.sub(y, x)]
                if cd in diff_cosets or cd in new:
                    ok = False
                    break
                new.add(cd)
            if not ok:
                continue
            found = extend(pts + [y], entry_cosets | {cy}, diff_cosets | new)
            if found is not None:
                return found
        return None

    try:
        base = extend([], set(), set())
    except _OutOfNodes:
        return SearchResult(None, budget, False)
    if base is None:
        return None  # no good 4-set; let the general search decide
    c6 = next(c for c in cosets if 1 in c)
    reps = []
    seen: set[int] = set()
    for c in sorted(c6):
        if c not in seen:
            reps.append(c)
            seen.update((c, fld.neg(c)))
    blocks = [tuple(fld.mul(s, b) for b in base) for s in reps]
    f = family(g, [g.zero()], blocks, kind="brdf", lam=1)
    report = verify_family(f)
    if not report.ok:
        raise DesignError(f"scaled-orbit family failed verification: {report.first_problem()}")
    return SearchResult(f, budget - budget_box.left, False)


def _lowest_zero_bit(x: int) -> int:
    i = 0
    while x & 1:
        x >>= 1
        i += 1
    return i


def _brdf_result(g, h, elems, state: _BrdfState, weak: bool, budget: int,
                 budget_box: _Budget) -> SearchResult:
    blocks = [
        tuple(elems[state.addf(p, t)] for p in blk)
        for blk, t in zip(state.norm_blocks, state.translates)
    ]
    f = family(g, h.elements, blocks, kind="weak" if weak else "brdf", lam=1)
    report = verify_family(f)
    if not report.ok:
        raise DesignError(f"search result failed verification: {report.first_problem()}")
    return SearchResult(f, budget - max(budget_box.left, 0), False)


# ---------------------------------------------------------------------------
# 16-tuples


def find_16tuple(
    q: int,
    budget: int = DEFAULT_TUPLE_BUDGET,
    seed: int | None = None,
) -> SearchResult:
    """Backtracking search for a 16-tuple meeting the coset conditions.

    Positions are filled left to right over the nonzero field elements in
    canonical order; difference constraints fire as soon as both endpoints
    are known.  The winning tuple is re-checked through check_16tuple.
    """
    from .direct import DELTA_INDEX, U_INDEX, check_16tuple, field_for
    from .groups import coset_of, index6_cosets

    fld = field_for(q)
    if q % 12 != 1:
        raise DesignError(f"q={q} is not 1 mod 12")
    c6, cosets = index6_cosets(fld)
    coset_id = [0] * q
    for v in range(1, q):
        coset_id[v] = coset_of(v, cosets)
    c6_id = coset_id[next(iter(c6))]

    delta_triggers: dict[int, list[tuple[int, int, int]]] = {p: [] for p in range(1, 17)}
    for li, pairs in enumerate(DELTA_INDEX.values()):
        for i, j in pairs:
            delta_triggers[max(i, j)].append((li, i, j))
    u_member: dict[int, int] = {}
    for li, idx in enumerate(U_INDEX.values()):
        for i in idx:
            u_member[i] = li

    units = list(range(1, q))
    if seed is not None:
        units = random.Random(seed).sample(units, len(units))
    budget_box = _Budget(budget)
    a = [0] * 17  # 1-based
    delta_used = [0] * 4  # bitmask of coset ids per difference list
    u_used = [0] * 4

    def dfs(pos: int) -> bool:
        if pos == 17:
            return True
        uli = u_member.get(pos)
        for val in units:
            if not budget_box.tick():
                return False
            a[pos] = val
            u_bit = 0
            if uli is not None:
                cid = coset_id[val]
                u_bit = 1 << cid
                if cid == c6_id or (u_used[uli] & u_bit):
                    continue
                u_used[uli] |= u_bit
            bits = []
            ok = True
            for li, i, j in delta_triggers[pos]:
                d = fld.sub(a[i], a[j])
                if d == 0:
                    ok = False
                    break
                bit = 1 << coset_id[d]
                if delta_used[li] & bit:
                    ok = False
                    break
                delta_used[li] |= bit
                bits.append((li, bit))
            if ok and dfs(pos + 1):
                return True
            for li, bit in bits:
                delta_used[li] &= ~bit
            if uli is not None and u_bit:
                u_used[uli] &= ~u_bit
        a[pos] = 0
        return False

    found = dfs(1)
    nodes = budget - max(budget_box.left, 0)
    if not found:
        return SearchResult(None, nodes, budget_box.left >= 0)
    tup = a[1:]
    ok, witness = check_16tuple(fld, tup)
    if not ok:
        raise DesignError(f"search result failed the coset conditions: {witness}")
    return SearchResult(tup, nodes, False)
