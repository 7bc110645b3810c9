"""Nesting maps, augmented designs and the parameter-level conditions.

A nesting assigns one extra point to every block occurrence so that the
augmented blocks form a partial design with block size k+1 and index
lambda+1.  phi is keyed by block occurrence index (block multisets may
repeat a block), and augmented blocks always keep the nested point in the
last position.

Every successful verification is appended to a process-wide log of
parameter summaries, which the characterization tests sweep (perfection
holds exactly when k = 2*lambda + 1, with equality in the pair-count
bound).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb

from .designs import (
    Design,
    DesignError,
    GroupDivisibleDesign,
    VerificationReport,
    pair_counts,
    verify_bibd,
    verify_gdd,
)


@dataclass(frozen=True)
class Nesting:
    """A base design together with phi, aligned with base.blocks."""

    base: Design
    phi: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.phi) != len(self.base.blocks):
            raise DesignError("phi must assign a point to every block occurrence")
        for blk, p in zip(self.base.blocks, self.phi):
            if p in blk:
                raise DesignError(f"nested point {p!r} lies inside its block {blk!r}")
            if p not in set(self.base.points):
                raise DesignError(f"nested point {p!r} is not a point of the design")

    @property
    def is_gdd(self) -> bool:
        return isinstance(self.base, GroupDivisibleDesign)


@dataclass(frozen=True)
class AugmentedDesign:
    """Blocks A + {phi(A)} (nested point last) and the nested-point multiset."""

    base: Design
    blocks: tuple
    nested_points: Counter


def apply_nesting(n: Nesting) -> AugmentedDesign:
    blocks = tuple(blk + (p,) for blk, p in zip(n.base.blocks, n.phi))
    return AugmentedDesign(n.base, blocks, Counter(n.phi))


# -- log of verified nestings, consumed by the characterization sweep

VERIFIED_NESTINGS: list[dict] = []


def _log_nesting(params: dict) -> None:
    VERIFIED_NESTINGS.append(params)


def verify_nesting(n: Nesting, lam: int, k: int | None = None) -> VerificationReport:
    """Full verification of a nesting.

    The base must verify exactly (as a BIBD, or as a GDD when it carries a
    group partition), and the augmented blocks must verify as the partial
    design with block size k+1 and index lam+1 of the same shape.
    """
    if k is None:
        sizes = n.base.block_sizes()
        if len(sizes) != 1:
            raise DesignError("base design has mixed block sizes; pass k explicitly")
        k = next(iter(sizes))
    aug = apply_nesting(n)
    if n.is_gdd:
        base: GroupDivisibleDesign = n.base  # type: ignore[assignment]
        base_report = verify_gdd(base, k, lam)
        if not base_report.ok:
            base_report.kind = "nesting-base"
            return base_report
        aug_gdd = GroupDivisibleDesign(base.points, aug.blocks, base.groups)
        aug_report = verify_gdd(aug_gdd, k + 1, lam + 1, partial=True)
        params = {
            "shape": "gdd", "type": base.type_string(),
            "v": base.v, "k": k, "lambda": lam, "b": base.b,
        }
    else:
        base_report = verify_bibd(n.base, n.base.v, k, lam)
        if not base_report.ok:
            base_report.kind = "nesting-base"
            return base_report
        aug_design = Design(n.base.points, aug.blocks)
        aug_report = verify_bibd(aug_design, n.base.v, k + 1, lam + 1, partial=True)
        params = {"shape": "bibd", "v": n.base.v, "k": k, "lambda": lam, "b": n.base.b}
    report = VerificationReport(aug_report.ok, "nesting", params, aug_report.problems)
    if report.ok:
        params["perfect"] = _augmented_is_perfect(n, aug, lam)
        params["cross_pairs"] = _cross_pair_count(n.base)
        _log_nesting(dict(params))
    return report


def _cross_pair_count(base: Design) -> int:
    total = comb(base.v, 2)
    if isinstance(base, GroupDivisibleDesign):
        total -= sum(comb(len(g), 2) for g in base.groups)
    return total


def _augmented_is_perfect(n: Nesting, aug: AugmentedDesign, lam: int) -> bool:
    import numpy as np

    v = n.base.v
    index = {p: i for i, p in enumerate(n.base.points)}
    counts = pair_counts(index, aug.blocks, v).reshape(v, v)
    mask = np.triu(np.ones((v, v), dtype=bool), k=1)
    if isinstance(n.base, GroupDivisibleDesign):
        gid = np.zeros(v, dtype=np.int64)
        for gi, g in enumerate(n.base.groups):
            for p in g:
                gid[index[p]] = gi
        mask &= gid[:, None] != gid[None, :]
    return bool((counts[mask] == lam + 1).all())


def is_perfect(n: Nesting, lam: int, k: int | None = None) -> bool:
    """True when every pair is covered exactly lam+1 times in the augmented
    design (cross-group pairs for a GDD)."""
    report = verify_nesting(n, lam, k)
    if not report.ok:
        raise DesignError(f"nesting does not verify: {report.first_problem()}")
    return bool(report.params["perfect"])


# ---------------------------------------------------------------------------
# parameter-level conditions


def bibd_nesting_conditions(v: int, k: int, lam: int) -> dict:
    """Necessary conditions for nesting a (v,k,lam)-BIBD.

    A nesting forces k >= 2*lam + 1; a perfect nesting forces k = 2*lam + 1
    and v = 1 mod 2k, in which case every point occurs (v-1)/(2k) times as
    a nested point.
    """
    if v < 2 or k < 2 or lam < 1:
        raise DesignError("need v >= 2, k >= 2, lam >= 1")
    if lam * (v - 1) % (k - 1) != 0 or lam * v * (v - 1) % (k * (k - 1)) != 0:
        raise DesignError(f"({v},{k},{lam}) are not BIBD parameters (r or b not integral)")
    r = lam * (v - 1) // (k - 1)
    b = lam * v * (v - 1) // (k * (k - 1))
    reasons = []
    nestable = k >= 2 * lam + 1
    if not nestable:
        reasons.append(f"k={k} < 2*lambda+1={2 * lam + 1}")
    perfect = k == 2 * lam + 1 and v % (2 * k) == 1
    if k != 2 * lam + 1:
        reasons.append(f"perfect needs k = 2*lambda+1 = {2 * lam + 1}")
    elif v % (2 * k) != 1:
        reasons.append(f"perfect needs v = 1 mod {2 * k}")
    out = {
        "v": v, "k": k, "lambda": lam, "r": r, "b": b,
        "nestable_possible": nestable, "perfect_possible": perfect,
        "reasons": reasons,
    }
    if perfect:
        out["r_prime"] = (lam + 1) * (v - 1) // k
        out["nested_per_point"] = (v - 1) // (2 * k)
    return out


def gdd_nesting_conditions(k: int, lam: int, t: int, u: int) -> dict:
    """Necessary conditions for a perfectly nested (k,lam)-GDD of type t^u.

    Evaluates the replication and block-count integralities of the base
    and augmented designs, the nested-count integrality t(u-1) = 0 mod 2k,
    k = 2*lam+1 and u >= k+1.  For (4,1)-GDDs of type 3^u the base
    conditions collapse to u = 0,1 mod 4, which is reported as well.
    """
    if t < 1 or u < 1:
        raise DesignError("need t, u >= 1")
    checks = {
        "base_replication": lam * t * (u - 1) % (k - 1) == 0,
        "base_block_count": lam * t * t * u * (u - 1) % (k * (k - 1)) == 0,
        "augmented_replication": (lam + 1) * t * (u - 1) % k == 0,
        "augmented_block_count": (lam + 1) * t * t * u * (u - 1) % ((k + 1) * k) == 0,
        "nested_count_integral": t * (u - 1) % (2 * k) == 0,
        "k_equals_2lam_plus_1": k == 2 * lam + 1,
        "enough_groups": u >= k + 1,
    }
    out = {
        "k": k, "lambda": lam, "t": t, "u": u,
        "checks": checks,
        "gdd_possible": checks["base_replication"] and checks["base_block_count"],
        "perfect_nesting_possible": all(checks.values()),
        "violated": sorted(name for name, ok in checks.items() if not ok),
    }
    if k == 4 and lam == 1 and t == 3:
        out["type3_feasible_u"] = "u = 0,1 mod 4"
        out["type3_u_ok"] = u % 4 in (0, 1)
    return out
