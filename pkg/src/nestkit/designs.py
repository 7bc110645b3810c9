"""Designs, group-divisible designs and exhaustive pair-count verification.

Points are group elements (ints or int tuples), abstract labels (ints or
strings) or infinity labels ("inf", "inf0", "inf1", "inf2").  Every
verifier counts all point pairs over all blocks with an exact triangular
counter; there is no sampling and no tolerance anywhere.  Reports carry
the first witness of a violation in canonical order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .groups import FiniteField, FiniteGroup, GroupError

INFINITY_LABELS = ("inf", "inf0", "inf1", "inf2")


class DesignError(ValueError):
    """Structurally invalid input (not a verification failure)."""


def point_key(p):
    """Total order over mixed point universes (ints, strings, tuples)."""
    if isinstance(p, int):
        return (0, p)
    if isinstance(p, str):
        return (1, p)
    return (2, tuple(point_key(c) for c in p))


def sort_points(points: Iterable) -> tuple:
    return tuple(sorted(points, key=point_key))


def sort_block(block: Iterable) -> tuple:
    return tuple(sorted(block, key=point_key))


@dataclass(frozen=True)
class Design:
    """Point set plus a block multiset; parameters live in the verifiers."""

    points: tuple
    blocks: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))

    @property
    def v(self) -> int:
        return len(self.points)

    @property
    def b(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> set[int]:
        return {len(b) for b in self.blocks}


@dataclass(frozen=True)
class GroupDivisibleDesign(Design):
    groups: tuple = dc_field(default=())

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "groups", tuple(tuple(g) for g in self.groups))

    def type_vector(self) -> Counter:
        return Counter(len(g) for g in self.groups)

    def type_string(self) -> str:
        counts = self.type_vector()
        return " ".join(f"{t}^{counts[t]}" for t in sorted(counts, reverse=True))


def design(points: Iterable, blocks: Iterable) -> Design:
    """Canonicalized design: sorted points, sorted blocks."""
    pts = sort_points(points)
    blks = tuple(sorted((sort_block(b) for b in blocks), key=lambda b: tuple(point_key(p) for p in b)))
    return Design(pts, blks)


def gdd(points: Iterable, groups: Iterable, blocks: Iterable) -> GroupDivisibleDesign:
    pts = sort_points(points)
    grps = tuple(sorted((sort_block(g) for g in groups), key=lambda g: tuple(point_key(p) for p in g)))
    blks = tuple(sorted((sort_block(b) for b in blocks), key=lambda b: tuple(point_key(p) for p in b)))
    return GroupDivisibleDesign(pts, blks, grps)


# ---------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    ok: bool
    kind: str
    params: dict
    problems: list[dict] = dc_field(default_factory=list)

    def first_problem(self) -> dict | None:
        return self.problems[0] if self.problems else None

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = ""
        if not self.ok and self.problems:
            extra = f" first={self.problems[0]}"
        return f"{status} {self.kind} {self.params}{extra}"

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "kind": self.kind,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "problems": [{k: _jsonable(v) for k, v in p.items()} for p in self.problems],
        }


def _jsonable(v):
    if isinstance(v, (tuple, frozenset, set)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


# ---------------------------------------------------------------------------
# pair counting


def pair_counts(index: dict, blocks: Sequence, v: int) -> np.ndarray:
    """Exact count of every unordered point pair over all blocks.

    Returns a flat array of length v*v indexed by i*v+j with i < j.
    Grouping blocks by size keeps the numpy paths fully vectorized.
    """
    counts = np.zeros(v * v, dtype=np.int64)
    by_size: dict[int, list[list[int]]] = {}
    for blk in blocks:
        by_size.setdefault(len(blk), []).append([index[p] for p in blk])
    for size, rows in by_size.items():
        if size < 2:
            continue
        arr = np.array(rows, dtype=np.int64)
        ii, jj = np.triu_indices(size, k=1)
        a = arr[:, ii].ravel()
        b = arr[:, jj].ravel()
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        counts += np.bincount(lo * v + hi, minlength=v * v)
    return counts


def _first_bad_pair(counts: np.ndarray, expected: np.ndarray, v: int):
    bad = np.flatnonzero(counts != expected)
    if len(bad) == 0:
        return None
    flat = int(bad[0])
    return flat // v, flat % v, int(counts[flat]), int(expected[flat])


def _pair_mask(v: int) -> np.ndarray:
    """Boolean mask over the flat v*v array selecting i < j cells."""
    i = np.arange(v).repeat(v)
    j = np.tile(np.arange(v), v)
    return i < j


# ---------------------------------------------------------------------------
# verifiers


def verify_bibd(
    d: Design,
    v: int,
    k: int | Iterable[int],
    lam: int,
    partial: bool = False,
) -> VerificationReport:
    """Check d against the (v,k,lam) pair-balance axioms.

    With partial=True every pair may be covered at most lam times; block
    sizes must still lie in k (an int or a set of ints, the latter giving
    the pairwise-balanced case).  The replication/block-count identities
    are reported for the exact single-k case.
    """
    sizes = {k} if isinstance(k, int) else set(k)
    params = {"v": v, "k": sorted(sizes) if len(sizes) > 1 else next(iter(sizes)),
              "lambda": lam, "partial": partial, "b": d.b}
    report = VerificationReport(True, "bibd", params)
    if len(d.points) != v:
        report.ok = False
        report.problems.append({"reason": "point count", "expected": v, "actual": len(d.points)})
        return report
    pset = set(d.points)
    if len(pset) != len(d.points):
        report.ok = False
        report.problems.append({"reason": "duplicate points"})
        return report
    for bi, blk in enumerate(d.blocks):
        if len(set(blk)) != len(blk):
            report.ok = False
            report.problems.append({"reason": "repeated point in block", "block": bi, "value": blk})
            return report
        if not set(blk) <= pset:
            report.ok = False
            report.problems.append({"reason": "block outside point set", "block": bi, "value": blk})
            return report
        if len(blk) not in sizes:
            report.ok = False
            report.problems.append({"reason": "block size", "block": bi, "size": len(blk)})
            return report
    if v == 0:
        return report
    index = {p: i for i, p in enumerate(d.points)}
    counts = pair_counts(index, d.blocks, v)
    mask = _pair_mask(v)
    if partial:
        over = np.flatnonzero(mask & (counts > lam))
        if len(over):
            flat = int(over[0])
            i, j = flat // v, flat % v
            report.ok = False
            report.problems.append({
                "reason": "pair over-covered", "pair": (d.points[i], d.points[j]),
                "count": int(counts[flat]), "max": lam,
            })
    else:
        expected = np.where(mask, lam, 0)
        bad = _first_bad_pair(np.where(mask, counts, 0), expected, v)
        if bad is not None:
            i, j, got, want = bad
            report.ok = False
            report.problems.append({
                "reason": "pair count", "pair": (d.points[i], d.points[j]),
                "count": got, "expected": want,
            })
        elif len(sizes) == 1:
            kk = next(iter(sizes))
            if lam * v * (v - 1) % (kk * (kk - 1)) == 0:
                b_expected = lam * v * (v - 1) // (kk * (kk - 1))
                if d.b != b_expected:
                    report.ok = False
                    report.problems.append({"reason": "block count", "expected": b_expected, "actual": d.b})
            params["r"] = lam * (v - 1) // (kk - 1) if v > 1 else 0
    return report


def verify_gdd(
    d: GroupDivisibleDesign,
    k: int | Iterable[int],
    lam: int,
    partial: bool = False,
) -> VerificationReport:
    """Check the group-divisible axioms: groups partition the points, blocks
    meet each group at most once, cross-group pairs are covered lam times
    (at most lam when partial) and intra-group pairs never."""
    sizes = {k} if isinstance(k, int) else set(k)
    params = {
        "k": sorted(sizes) if len(sizes) > 1 else next(iter(sizes)),
        "lambda": lam, "partial": partial,
        "type": d.type_string(), "b": d.b,
    }
    report = VerificationReport(True, "gdd", params)
    pset = set(d.points)
    covered: set = set()
    for g in d.groups:
        gs = set(g)
        if not gs <= pset or (gs & covered):
            report.ok = False
            report.problems.append({"reason": "groups do not partition points", "group": g})
            return report
        covered |= gs
    if covered != pset:
        report.ok = False
        report.problems.append({"reason": "groups do not cover points"})
        return report
    v = len(d.points)
    index = {p: i for i, p in enumerate(d.points)}
    gid = [0] * v
    for gi, g in enumerate(d.groups):
        for p in g:
            gid[index[p]] = gi
    for bi, blk in enumerate(d.blocks):
        if len(set(blk)) != len(blk) or not set(blk) <= pset:
            report.ok = False
            report.problems.append({"reason": "bad block", "block": bi, "value": blk})
            return report
        if len(blk) not in sizes:
            report.ok = False
            report.problems.append({"reason": "block size", "block": bi, "size": len(blk)})
            return report
        gids = [gid[index[p]] for p in blk]
        if len(set(gids)) != len(gids):
            report.ok = False
            report.problems.append({"reason": "block meets a group twice", "block": bi, "value": blk})
            return report
    counts = pair_counts(index, d.blocks, v)
    gid_arr = np.array(gid, dtype=np.int64)
    cross = gid_arr[:, None] != gid_arr[None, :]
    mask = _pair_mask(v) & cross.ravel()
    imask = _pair_mask(v) & ~cross.ravel()
    if np.any(counts[imask] != 0):  # unreachable given the block checks above
        flat = int(np.flatnonzero(imask & (counts != 0))[0])
        report.ok = False
        report.problems.append({"reason": "intra-group pair covered",
                                "pair": (d.points[flat // v], d.points[flat % v])})
        return report
    if partial:
        over = np.flatnonzero(mask & (counts > lam))
        if len(over):
            flat = int(over[0])
            report.ok = False
            report.problems.append({
                "reason": "pair over-covered",
                "pair": (d.points[flat // v], d.points[flat % v]),
                "count": int(counts[flat]), "max": lam,
            })
    else:
        bad = np.flatnonzero(mask & (counts != lam))
        if len(bad):
            flat = int(bad[0])
            report.ok = False
            report.problems.append({
                "reason": "pair count",
                "pair": (d.points[flat // v], d.points[flat % v]),
                "count": int(counts[flat]), "expected": lam,
            })
    return report


# ---------------------------------------------------------------------------
# development of base blocks


@dataclass(frozen=True)
class OrbitSpec:
    """One base block plus its translation set.

    translations is a subgroup (or the whole group) given as an element
    tuple in canonical order; count selects the first `count` translates.
    Infinity labels require an action: "fixed" leaves them alone, "mod3"
    is inf_i + g = inf_{(i+g) mod 3} over a single cyclic factor.
    """

    block: tuple
    translations: tuple
    count: int
    infinity_action: str = "none"

    def __post_init__(self) -> None:
        object.__setattr__(self, "block", tuple(self.block))
        object.__setattr__(self, "translations", tuple(self.translations))
        if not (1 <= self.count <= len(self.translations)):
            raise DesignError(f"translate count {self.count} out of range")
        if self.infinity_action not in ("none", "fixed", "mod3"):
            raise DesignError(f"unknown infinity action {self.infinity_action!r}")


def full_orbit(group: FiniteGroup, block: Sequence, infinity_action: str = "none") -> OrbitSpec:
    elems = tuple(group.elements())
    return OrbitSpec(tuple(block), elems, len(elems), infinity_action)


def partial_orbit(group: FiniteGroup, block: Sequence, count: int,
                  infinity_action: str = "none") -> OrbitSpec:
    elems = tuple(group.elements())
    return OrbitSpec(tuple(block), elems, count, infinity_action)


def subgroup_orbit(group: FiniteGroup, block: Sequence, translations: Sequence,
                   infinity_action: str = "none") -> OrbitSpec:
    return OrbitSpec(tuple(block), tuple(translations), len(tuple(translations)), infinity_action)


def translate_point(group: FiniteGroup, p, g, infinity_action: str):
    if isinstance(p, str):
        if p not in INFINITY_LABELS:
            raise DesignError(f"unknown point label {p!r}")
        if infinity_action == "fixed":
            return p
        if infinity_action == "mod3":
            if not isinstance(g, int):
                raise DesignError("mod3 infinity action needs a single cyclic factor")
            i = int(p[3:])
            return f"inf{(i + g) % 3}"
        raise DesignError("infinity label used without a declared action")
    if not group.contains(p):
        raise DesignError(f"{p!r} is not inside the point universe")
    return group.add(p, g)


def translate_block(group: FiniteGroup, block: Sequence, g, infinity_action: str) -> tuple:
    return sort_block(translate_point(group, p, g, infinity_action) for p in block)


def develop(specs: Sequence[OrbitSpec], group: FiniteGroup) -> list[tuple]:
    """Union of the first `count` translates of every base block.

    A full orbit with a nontrivial stabilizer would silently emit duplicate
    blocks, so that case is rejected; a partial count must hit pairwise
    distinct translates.
    """
    out: list[tuple] = []
    for spec in specs:
        translates = []
        seen = set()
        for g in spec.translations[: spec.count]:
            blk = translate_block(group, spec.block, g, spec.infinity_action)
            if blk in seen:
                raise DesignError(
                    f"base block {spec.block!r} has a nontrivial stabilizer; "
                    f"declare the matching partial count"
                )
            seen.add(blk)
            translates.append(blk)
        if spec.count == len(spec.translations):
            pass  # distinctness above already proves the stabilizer is trivial
        out.extend(translates)
    return out


# ---------------------------------------------------------------------------
# classic objects


def affine_plane(q: int) -> tuple[Design, list[list[tuple]]]:
    """AG(2,q): a resolvable (q^2, q, 1)-BIBD with its q+1 parallel classes.

    Points are pairs over GF(q); lines are y = a*x + b plus the verticals.
    """
    fld = FiniteField(*_as_prime_power(q))
    pts = [(x, y) for x in range(q) for y in range(q)]
    classes: list[list[tuple]] = []
    for a in range(q):
        cls = []
        for b in range(q):
            cls.append(sort_block((x, fld.add(fld.mul(a, x), b)) for x in range(q)))
        classes.append(sorted(cls))
    classes.append(sorted(sort_block((c, y) for y in range(q)) for c in range(q)))
    blocks = [blk for cls in classes for blk in cls]
    return design(pts, blocks), classes


def transversal_design(k: int, q: int) -> GroupDivisibleDesign:
    """TD(k,q) of type q^k for a prime power q, k <= q+1.

    Derived from the point classes of the plane over GF(q): groups are
    indexed by slopes e (plus the infinite slope when k = q+1) and the
    block for (a,b) picks the point (e, a*e+b) from each class.
    """
    fld = FiniteField(*_as_prime_power(q))
    if k > q + 1:
        raise DesignError(f"TD({k},{q}) needs k <= q+1")
    if k < 2:
        raise DesignError("TD needs k >= 2")
    slopes: list = list(range(min(k, q)))
    use_infinite = k == q + 1
    pts = [(e, x) for e in range(k) for x in range(q)]
    blocks = []
    for a in range(q):
        for b in range(q):
            blk = [(i, fld.add(fld.mul(a, e), b)) for i, e in enumerate(slopes)]
            if use_infinite:
                blk.append((q, a))
            blocks.append(sort_block(blk))
    groups = [sort_block((i, x) for x in range(q)) for i in range(k)]
    return gdd(pts, groups, blocks)


def pbd_to_gdd(d: Design, x) -> GroupDivisibleDesign:
    """Delete the point x: blocks through x become the groups."""
    if x not in d.points:
        raise DesignError(f"{x!r} is not a point of the design")
    groups = []
    blocks = []
    for blk in d.blocks:
        if x in blk:
            groups.append(sort_block(p for p in blk if p != x))
        else:
            blocks.append(blk)
    pts = [p for p in d.points if p != x]
    return gdd(pts, groups, blocks)


def _as_prime_power(q: int) -> tuple[int, int]:
    from .groups import factorize

    fac = factorize(q)
    if len(fac) != 1:
        raise DesignError(f"{q} is not a prime power")
    (p, d), = fac.items()
    return p, d
