"""Nesting maps, perfection, and the parameter-level conditions."""

from __future__ import annotations

import pytest

from nestkit.designs import Design, DesignError, design, develop, full_orbit, gdd, sort_block
from nestkit.groups import make_group, subgroup
from nestkit.nestings import (
    Nesting,
    apply_nesting,
    bibd_nesting_conditions,
    gdd_nesting_conditions,
    is_perfect,
    verify_nesting,
)

# the thirteen augmented blocks of the base-case cyclic design, nested with
# the translation index (last entry is the nested point)
AUGMENTED_13 = [
    [1, 2, 4, 10, 0], [2, 3, 5, 11, 1], [3, 4, 6, 12, 2], [4, 5, 7, 0, 3],
    [5, 6, 8, 1, 4], [6, 7, 9, 2, 5], [7, 8, 10, 3, 6], [8, 9, 11, 4, 7],
    [9, 10, 12, 5, 8], [10, 11, 0, 6, 9], [11, 12, 1, 7, 10], [12, 0, 2, 8, 11],
    [0, 1, 3, 9, 12],
]


def _nesting_13() -> Nesting:
    blocks = [sort_block(b[:4]) for b in AUGMENTED_13]
    phi = [b[4] for b in AUGMENTED_13]
    order = sorted(range(13), key=lambda i: blocks[i])
    base = Design(tuple(range(13)), tuple(blocks[i] for i in order))
    return Nesting(base, tuple(phi[i] for i in order))


def test_apply_nesting_matches_published_blocks():
    n = _nesting_13()
    aug = apply_nesting(n)
    got = {tuple(sorted(b[:-1])) + (b[-1],) for b in aug.blocks}
    want = {tuple(sorted(b[:4])) + (b[4],) for b in AUGMENTED_13}
    assert got == want
    assert all(len(b) == 5 for b in aug.blocks)
    assert aug.nested_points == {i: 1 for i in range(13)}


def test_apply_nesting_toy():
    base = Design((0, 1, 2, 4), ((1, 2, 4),))
    aug = apply_nesting(Nesting(base, (0,)))
    assert aug.blocks == ((1, 2, 4, 0),)


def test_nesting_rejects_nested_point_inside_block():
    base = Design((0, 1, 2, 4), ((1, 2, 4),))
    with pytest.raises(DesignError):
        Nesting(base, (2,))


def test_verify_nesting_13():
    report = verify_nesting(_nesting_13(), 1)
    assert report.ok
    assert report.params["perfect"] is False


def _developed_nesting(g, base_block, v):
    """Translate the base block through Z_v, nesting translate t with t."""
    pairs = []
    for t in range(v):
        blk = sort_block((p + t) % v for p in base_block)
        pairs.append((blk, t))
    pairs.sort()
    return [b for b, _ in pairs], [t for _, t in pairs]


def test_verify_nesting_gdd_type_3_5():
    g = make_group("Z15")
    blocks, phi = _developed_nesting(g, (1, 2, 4, 8), 15)
    h = subgroup(g, [0, 5, 10])
    base = gdd(g.elements(), h.cosets(), blocks)
    n = Nesting(base, tuple(phi))
    report = verify_nesting(n, 1)
    assert report.ok
    assert report.params["type"] == "3^5"


def test_verify_nesting_constant_phi_fails():
    g = make_group("Z13")
    blocks = develop([full_orbit(g, (1, 2, 4, 10))], g)
    d = design(g.elements(), blocks)
    # nest every block with the same point not inside it (brute-forced witness)
    for c in range(13):
        if all(c not in blk for blk in d.blocks):
            break
    else:
        c = next(x for x in range(13) if sum(x in blk for blk in d.blocks) < 13)
    phi = []
    ok_blocks = []
    for blk in d.blocks:
        if c in blk:
            continue
        ok_blocks.append(blk)
        phi.append(c)
    partial_base = Design(d.points, tuple(ok_blocks))
    report = verify_nesting(Nesting(partial_base, tuple(phi)), 1)
    assert not report.ok
    assert report.first_problem()["reason"] in ("pair over-covered", "pair count")


def test_sts7_perfect_nesting():
    g = make_group("Z7")
    blocks, phi = _developed_nesting(g, (1, 2, 4), 7)
    base = Design(tuple(range(7)), tuple(blocks))
    n = Nesting(base, tuple(phi))
    # exhaustive oracle: the augmented design is a (7,4,2) design
    counts = {}
    for blk, p in zip(base.blocks, n.phi):
        aug = list(blk) + [p]
        for i in range(4):
            for j in range(i + 1, 4):
                key = tuple(sorted((aug[i], aug[j])))
                counts[key] = counts.get(key, 0) + 1
    assert set(counts.values()) == {2} and len(counts) == 21
    assert is_perfect(n, 1)
    # every point occurs exactly (7-1)/6 = 1 time as a nested point
    assert sorted(n.phi) == list(range(7))


def test_is_perfect_false_for_k4():
    assert not is_perfect(_nesting_13(), 1)


def test_is_perfect_false_for_partial_only():
    base = Design((0, 1, 2, 3, 4, 5, 6), ((1, 2, 4),))
    n = Nesting(base, (0,))
    report = verify_nesting(n, 1)
    assert not report.ok  # base is not a BIBD at all
    with pytest.raises(DesignError):
        is_perfect(n, 1)


def test_bibd_nesting_conditions():
    out = bibd_nesting_conditions(7, 2, 1)
    assert out["nestable_possible"] is False

    out = bibd_nesting_conditions(13, 3, 1)
    assert out["perfect_possible"] is True
    assert out["r_prime"] - out["r"] == 2 == out["nested_per_point"]

    out = bibd_nesting_conditions(16, 4, 1)
    assert out["nestable_possible"] is True
    assert out["perfect_possible"] is False


def test_bibd_nesting_conditions_bad_params():
    with pytest.raises(DesignError):
        bibd_nesting_conditions(11, 4, 1)  # r not integral


def test_gdd_nesting_conditions():
    out = gdd_nesting_conditions(3, 1, 3, 7)
    assert out["perfect_nesting_possible"] is True

    out = gdd_nesting_conditions(4, 1, 3, 8)
    assert out["type3_feasible_u"] == "u = 0,1 mod 4"
    assert out["type3_u_ok"] is True

    out = gdd_nesting_conditions(4, 1, 3, 6)
    assert out["perfect_nesting_possible"] is False
    assert out["violated"]
    assert not out["type3_u_ok"]
    assert not out["gdd_possible"]
