"""Relative difference families, their Banff variants and the translations
into nested designs.

A (G,H,k,lambda)-RDF covers every difference in G minus H exactly lambda
times and no difference in H.  The Banff conditions add that base blocks
avoid H and that blocks together with their negatives are pairwise
disjoint; the weak variant over (Z_v, {0, v/4, v/2, 3v/4}) lets a block
touch v/4 or 3v/4.  Developing a Banff family with every block nested at 0
gives a nested GDD whose groups are the cosets of H; a suitable extra
point x upgrades the weak case to a full nested BIBD by appending the
first v/4 translates of the short-orbit block H + {x}.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .designs import (
    DesignError,
    GroupDivisibleDesign,
    VerificationReport,
    full_orbit,
    gdd,
    partial_orbit,
    sort_block,
)
from .groups import FiniteGroup, Subgroup, subgroup, trivial_subgroup
from .nestings import Nesting, verify_nesting

KINDS = ("rdf", "weak", "brdf", "perfect")


@dataclass(frozen=True)
class DifferenceFamily:
    group: FiniteGroup
    subgroup: Subgroup
    blocks: tuple
    kind: str = "brdf"
    lam: int = 1

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DesignError(f"unknown family kind {self.kind!r}")
        if self.subgroup.parent != self.group:
            raise DesignError("subgroup must live in the family's group")
        blocks = tuple(sort_block(b) for b in self.blocks)
        blocks = tuple(sorted(blocks, key=lambda b: tuple(self.group.index(p) for p in b)))
        object.__setattr__(self, "blocks", blocks)
        for blk in blocks:
            for p in blk:
                if not self.group.contains(p):
                    raise DesignError(f"{p!r} is not an element of {self.group.descriptor()}")

    @property
    def k(self) -> int:
        sizes = {len(b) for b in self.blocks}
        if len(sizes) != 1:
            raise DesignError("family has mixed block sizes")
        return next(iter(sizes))

    def negatives(self) -> list[tuple]:
        g = self.group
        return [sort_block(g.neg(p) for p in blk) for blk in self.blocks]


def family(group: FiniteGroup, h_elements: Iterable, blocks: Iterable,
           kind: str = "brdf", lam: int = 1) -> DifferenceFamily:
    h = subgroup(group, h_elements) if h_elements else trivial_subgroup(group)
    return DifferenceFamily(group, h, tuple(tuple(b) for b in blocks), kind, lam)


# ---------------------------------------------------------------------------
# verifiers


def verify_rdf(f: DifferenceFamily) -> VerificationReport:
    """Property (1): the multiset of ordered within-block differences equals
    lam copies of every element of G minus H, and no element of H."""
    g = f.group
    h = f.subgroup.elements
    params = {"group": g.descriptor(), "h": len(h), "k": None, "lambda": f.lam,
              "blocks": len(f.blocks)}
    report = VerificationReport(True, "rdf", params)
    try:
        params["k"] = f.k
    except DesignError:
        report.ok = False
        report.problems.append({"reason": "mixed block sizes"})
        return report
    diffs: Counter = Counter()
    for blk in f.blocks:
        if len(set(blk)) != len(blk):
            report.ok = False
            report.problems.append({"reason": "repeated point in block", "value": blk})
            return report
        for a in blk:
            for b in blk:
                if a != b:
                    diffs[g.sub(a, b)] += 1
    for d in sorted(set(g.elements()) - {g.zero()}, key=g.index):
        want = 0 if d in h else f.lam
        got = diffs.get(d, 0)
        if got != want:
            report.ok = False
            report.problems.append({"reason": "difference multiplicity", "difference": d,
                                    "count": got, "expected": want})
            return report
    if diffs.get(g.zero(), 0):
        report.ok = False
        report.problems.append({"reason": "zero difference"})
    return report


def _banff_problems(f: DifferenceFamily, forbidden: set) -> list[dict]:
    """Disjointness bookkeeping shared by the strict and weak verifiers:
    blocks avoid `forbidden`, and blocks plus negatives are pairwise
    disjoint (equivalently, all 2k * #blocks points are distinct)."""
    seen: dict = {}
    problems = []
    for bi, blk in enumerate(f.blocks):
        for p in blk:
            if p in forbidden:
                problems.append({"reason": "block meets forbidden set", "block": bi, "value": p})
                return problems
    labelled = [(bi, blk) for bi, blk in enumerate(f.blocks)]
    labelled += [(bi, neg) for bi, neg in enumerate(f.negatives())]
    for bi, blk in labelled:
        for p in blk:
            if p in seen:
                problems.append({"reason": "blocks and negatives not disjoint",
                                 "value": p, "blocks": (seen[p], bi)})
                return problems
            seen[p] = bi
    return problems


def verify_brdf(f: DifferenceFamily, perfect: bool = False) -> VerificationReport:
    """Properties (1)-(3); with perfect=True also (2'): the blocks and their
    negatives partition G minus H."""
    report = verify_rdf(f)
    report.kind = "perfect-brdf" if perfect else "brdf"
    if not report.ok:
        return report
    g = f.group
    problems = _banff_problems(f, set(f.subgroup.elements))
    if problems:
        report.ok = False
        report.problems.extend(problems)
        return report
    if perfect:
        union = {p for blk in f.blocks for p in blk}
        union |= {p for blk in f.negatives() for p in blk}
        target = set(g.elements()) - set(f.subgroup.elements)
        if union != target:
            report.ok = False
            missing = sorted(target - union, key=g.index)
            report.problems.append({"reason": "blocks and negatives do not partition G-H",
                                    "missing": missing[:4]})
    return report


def short_orbit_subgroup(group: FiniteGroup) -> Subgroup:
    """The order-4 subgroup {0, v/4, v/2, 3v/4} of a cyclic group Z_v."""
    v = group.order
    if v % 4 != 0:
        raise DesignError(f"|G|={v} is not divisible by 4")
    if len(group.factors) != 1 or not isinstance(group.zero(), int):
        raise DesignError("short-orbit subgroup is defined over cyclic Z_v")
    return subgroup(group, [0, v // 4, v // 2, 3 * v // 4])


def verify_weak_brdf(f: DifferenceFamily) -> VerificationReport:
    """Weak Banff axioms over (Z_v, {0, v/4, v/2, 3v/4}): properties (1) and
    (3) hold, property (2) is relaxed so blocks avoid 0 and v/2 but may
    contain v/4 or 3v/4."""
    v = f.group.order
    expected = short_orbit_subgroup(f.group)
    if f.subgroup.elements != expected.elements:
        report = VerificationReport(False, "weak-brdf", {"group": f.group.descriptor()})
        report.problems.append({"reason": "subgroup is not {0, v/4, v/2, 3v/4}"})
        return report
    report = verify_rdf(f)
    report.kind = "weak-brdf"
    if not report.ok:
        return report
    problems = _banff_problems(f, {0, v // 2})
    if problems:
        report.ok = False
        report.problems.extend(problems)
    return report


def verify_family(f: DifferenceFamily) -> VerificationReport:
    """Dispatch on the family's declared strictness flag."""
    if f.kind == "rdf":
        return verify_rdf(f)
    if f.kind == "weak":
        return verify_weak_brdf(f)
    return verify_brdf(f, perfect=f.kind == "perfect")


# ---------------------------------------------------------------------------
# suitable points for the short orbit


def suitable_points(f: DifferenceFamily) -> list:
    """All x outside H for which the eight values +-(H - x) are pairwise
    distinct and avoid the blocks and their negatives.

    Distinctness is the published backtracking condition ("the differences
    that include a nested point are all different"); it rules out 2x in H,
    which the disjointness test alone would miss.
    """
    g = f.group
    h = f.subgroup.sorted_elements()
    used = {p for blk in f.blocks for p in blk}
    used |= {p for blk in f.negatives() for p in blk}
    out = []
    for x in g.elements():
        if x in f.subgroup.elements:
            continue
        deltas = set()
        for e in h:
            d = g.sub(e, x)
            deltas.add(d)
            deltas.add(g.neg(d))
        if len(deltas) != 2 * len(h):
            continue
        if deltas & used:
            continue
        out.append(x)
    return sorted(out, key=g.index)


# ---------------------------------------------------------------------------
# translations into nested designs


def brdf_to_nested_gdd(f: DifferenceFamily) -> tuple[GroupDivisibleDesign, Nesting]:
    """Develop a strict BRDF: nest every base block with 0, take all
    translates, and use the cosets of H as groups."""
    g = f.group
    report = verify_brdf(f)
    if not report.ok:
        raise DesignError(f"family is not a BRDF: {report.first_problem()}")
    translates = list(g.elements())
    blocks = []
    phi = []
    for blk in f.blocks:
        for t in translates:
            blocks.append(sort_block(g.add(p, t) for p in blk))
            phi.append(t)
    order = sorted(range(len(blocks)),
                   key=lambda i: tuple(g.index(p) for p in blocks[i]) + (g.index(phi[i]),))
    blocks = [blocks[i] for i in order]
    phi = [phi[i] for i in order]
    if len(set(blocks)) != len(blocks):
        raise DesignError("a base block has a nontrivial stabilizer")
    groups = f.subgroup.cosets()
    d = GroupDivisibleDesign(tuple(sorted(g.elements(), key=g.index)), tuple(blocks), tuple(groups))
    nesting = Nesting(d, tuple(phi))
    report = verify_nesting(nesting, f.lam)
    if not report.ok:
        raise DesignError(f"developed family does not nest: {report.first_problem()}")
    return d, nesting


def brdf_to_nested_bibd(f: DifferenceFamily) -> Nesting:
    """Degenerate |H| = 1 case: the type 1^v GDD is just a (v,k,lam)-BIBD."""
    if f.subgroup.order != 1:
        raise DesignError("only a family over H = {0} develops into a BIBD directly")
    d, nesting = brdf_to_nested_gdd(f)
    from .designs import Design

    base = Design(d.points, d.blocks)
    flat = Nesting(base, nesting.phi)
    report = verify_nesting(flat, f.lam)
    if not report.ok:
        raise DesignError(f"developed family does not nest: {report.first_problem()}")
    return flat


def weak_brdf_to_nested_bibd(f: DifferenceFamily, x) -> Nesting:
    """Weak family plus a suitable x: all translates of the nested base
    blocks together with the first v/4 translates of H + {x}, the t-th
    short-orbit translate nested with x + t."""
    g = f.group
    v = g.order
    report = verify_weak_brdf(f)
    if not report.ok:
        raise DesignError(f"family is not a weak BRDF: {report.first_problem()}")
    if x not in set(suitable_points(f)):
        raise DesignError(f"x={x!r} is not a suitable point")
    h = f.subgroup.sorted_elements()
    blocks = []
    phi = []
    for blk in f.blocks:
        for t in g.elements():
            blocks.append(sort_block(g.add(p, t) for p in blk))
            phi.append(t)
    if len(set(blocks)) != len(blocks):
        raise DesignError("a base block has a nontrivial stabilizer")
    for t in range(v // 4):
        blocks.append(sort_block(g.add(p, t) for p in h))
        phi.append(g.add(x, t))
    from .designs import Design

    order = sorted(range(len(blocks)),
                   key=lambda i: tuple(g.index(p) for p in blocks[i]) + (g.index(phi[i]),))
    base = Design(tuple(sorted(g.elements(), key=g.index)),
                  tuple(blocks[i] for i in order))
    nesting = Nesting(base, tuple(phi[i] for i in order))
    report = verify_nesting(nesting, f.lam)
    if not report.ok:
        raise DesignError(f"augmented development does not verify: {report.first_problem()}")
    return nesting


def brdf_short_orbit_nesting(f: DifferenceFamily, g_offset) -> Nesting:
    """Strict BRDF with |H| = k: add every coset of H as a block, nesting
    the coset through t with g_offset + t.

    Requires H + g_offset to avoid all base blocks and their negatives; the
    resulting design is a (v,k,1)-BIBD and the map is a verified nesting.
    """
    g = f.group
    report = verify_brdf(f)
    if not report.ok:
        raise DesignError(f"family is not a BRDF: {report.first_problem()}")
    if f.subgroup.order != f.k:
        raise DesignError("short-orbit nesting needs |H| = k")
    if g_offset in f.subgroup.elements:
        raise DesignError("offset must lie outside H")
    used = {p for blk in f.blocks for p in blk}
    used |= {p for blk in f.negatives() for p in blk}
    coset = {g.add(p, g_offset) for p in f.subgroup.elements}
    if coset & used:
        raise DesignError(f"coset H+{g_offset!r} meets the blocks or their negatives")
    blocks = []
    phi = []
    for blk in f.blocks:
        for t in g.elements():
            blocks.append(sort_block(g.add(p, t) for p in blk))
            phi.append(t)
    if len(set(blocks)) != len(blocks):
        raise DesignError("a base block has a nontrivial stabilizer")
    for cs in f.subgroup.cosets():
        rep = cs[0]  # minimal element, so the coset is H + rep exactly once
        blocks.append(cs)
        phi.append(g.add(g_offset, rep))
    from .designs import Design

    order = sorted(range(len(blocks)),
                   key=lambda i: tuple(g.index(p) for p in blocks[i]) + (g.index(phi[i]),))
    base = Design(tuple(sorted(g.elements(), key=g.index)),
                  tuple(blocks[i] for i in order))
    nesting = Nesting(base, tuple(phi[i] for i in order))
    report = verify_nesting(nesting, f.lam)
    if not report.ok:
        raise DesignError(f"short-orbit nesting does not verify: {report.first_problem()}")
    return nesting


def qualifying_short_orbit_offsets(f: DifferenceFamily) -> list:
    """All g with H+g disjoint from the blocks and their negatives."""
    g = f.group
    used = {p for blk in f.blocks for p in blk}
    used |= {p for blk in f.negatives() for p in blk}
    out = []
    seen_cosets = set()
    for cs in f.subgroup.cosets():
        if cs == tuple(f.subgroup.sorted_elements()):
            continue
        if not (set(cs) & used):
            out.append(cs[0])
        seen_cosets.add(cs)
    return out
