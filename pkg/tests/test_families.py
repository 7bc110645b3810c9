"""Difference families: axioms, suitable points, nested-design translations."""

from __future__ import annotations

import pytest

from nestkit.catalog import load_family
from nestkit.designs import DesignError
from nestkit.families import (
    brdf_short_orbit_nesting,
    brdf_to_nested_bibd,
    brdf_to_nested_gdd,
    family,
    qualifying_short_orbit_offsets,
    suitable_points,
    verify_brdf,
    verify_rdf,
    verify_weak_brdf,
    weak_brdf_to_nested_bibd,
)
from nestkit.groups import make_group
from nestkit.nestings import verify_nesting


def test_rdf_z15():
    f = family(make_group("Z15"), [0, 5, 10], [[1, 2, 4, 8]])
    report = verify_rdf(f)
    assert report.ok
    # the covered differences are exactly +-{1,2,3,4,6,7}
    diffs = set()
    blk = f.blocks[0]
    for a in blk:
        for b in blk:
            if a != b:
                diffs.add((a - b) % 15)
    assert diffs == {1, 2, 3, 4, 6, 7, 14, 13, 12, 11, 9, 8}


def test_rdf_table1_v37():
    f = load_family("table1-v37")
    assert verify_rdf(f).ok
    # total ordered differences k(k-1)*blocks = lam*(|G|-|H|)
    assert 12 * len(f.blocks) == 1 * (37 - 1)


def test_rdf_failure_witness():
    f = family(make_group("Z13"), [0], [[1, 2, 3, 5]], kind="rdf")
    report = verify_rdf(f)
    assert not report.ok
    assert report.first_problem()["difference"] == 1
    assert report.first_problem()["count"] == 2


def test_brdf_z15_negative_block():
    f = load_family("brdf-z15")
    assert verify_brdf(f).ok
    assert f.negatives() == [(7, 11, 13, 14)]


def test_brdf_weak_only_v40():
    f = load_family("weak-v40")
    strict = verify_brdf(f)
    assert not strict.ok  # 10 = v/4 occurs in a base block
    assert strict.first_problem()["value"] == 10
    assert verify_weak_brdf(f).ok


def test_brdf_v52_also_strict():
    f = load_family("brdf-v52")
    assert verify_weak_brdf(f).ok
    assert verify_brdf(f).ok


def test_perfect_brdf_z7():
    g = make_group("Z7")
    f = family(g, [0], [[1, 2, 4]], kind="perfect")
    report = verify_brdf(f, perfect=True)
    assert report.ok
    union = {p for blk in f.blocks for p in blk} | {p for blk in f.negatives() for p in blk}
    assert union == {1, 2, 3, 4, 5, 6}


def test_weak_rejects_zero_in_block():
    g = make_group("Z40")
    f = family(g, [0, 10, 20, 30], [[0, 1, 2, 3]], kind="weak")
    report = verify_weak_brdf(f)
    assert not report.ok


def test_weak_rejects_wrong_subgroup():
    g = make_group("Z40")
    f = family(g, [0, 20], [[2, 1, 16, 10]], kind="weak")
    report = verify_weak_brdf(f)
    assert not report.ok


def test_suitable_points_v40():
    f = load_family("weak-v40")
    xs = suitable_points(f)
    assert 3 in xs
    # the eight differences for x = 3 are +-{3, 7, 17, 13}
    deltas = {(h - 3) % 40 for h in (0, 10, 20, 30)}
    deltas |= {(-d) % 40 for d in deltas}
    assert deltas == {3, 7, 17, 13, 37, 33, 23, 27}
    used = {p for blk in f.blocks for p in blk}
    used |= {p for blk in f.negatives() for p in blk}
    assert not (deltas & used)


def test_suitable_points_v52():
    f = load_family("brdf-v52")
    assert 3 in suitable_points(f)


def test_suitable_points_empty_when_covered():
    # blocks + negatives covering everything outside H leave no room
    g = make_group("Z16")
    f = family(g, [0, 4, 8, 12], [[1, 2, 3, 5], [6, 7, 9, 10]], kind="weak", lam=1)
    assert suitable_points(f) == []


def test_suitable_points_agree_with_brute_force():
    """x is suitable iff appending the augmented short-orbit translates
    keeps every augmented pair count at most 2."""
    f = load_family("weak-v40")
    v = 40
    h = [0, 10, 20, 30]
    base_counts: dict = {}

    def bump(counts, a, b):
        key = (a, b) if a < b else (b, a)
        counts[key] = counts.get(key, 0) + 1

    for blk in f.blocks:
        for t in range(v):
            aug = [(p + t) % v for p in blk] + [t]
            for i in range(5):
                for j in range(i + 1, 5):
                    bump(base_counts, aug[i], aug[j])
    for t in range(10):
        blk = [(p + t) % v for p in h]
        for i in range(4):
            for j in range(i + 1, 4):
                bump(base_counts, blk[i], blk[j])

    expected = set(suitable_points(f))
    got = set()
    for x in range(v):
        if x in (0, 10, 20, 30):
            continue
        counts = dict(base_counts)
        for t in range(10):
            for p in h:
                bump(counts, (p + t) % v, (x + t) % v)
        if max(counts.values()) <= 2:
            got.add(x)
    assert got == expected


def test_brdf_to_nested_gdd_z15():
    f = load_family("brdf-z15")
    d, nesting = brdf_to_nested_gdd(f)
    assert d.type_string() == "3^5"
    assert verify_nesting(nesting, 1).ok


def test_brdf_to_nested_gdd_theorem3_v5():
    from nestkit.direct import construct_3v_brdf

    f = construct_3v_brdf(5)
    d, nesting = brdf_to_nested_gdd(f)
    assert d.type_string() == "3^5"
    assert d.v == 15


def test_brdf_to_nested_bibd_table1():
    f = load_family("table1-v13")
    nesting = brdf_to_nested_bibd(f)
    assert nesting.base.v == 13 and nesting.base.b == 13
    report = verify_nesting(nesting, 1)
    assert report.ok and report.params["shape"] == "bibd"


def test_weak_to_nested_bibd():
    for eid, v, x in [("weak-v40", 40, 3), ("brdf-v52", 52, 3), ("brdf-v100", 100, 10)]:
        f = load_family(eid)
        nesting = weak_brdf_to_nested_bibd(f, x)
        assert nesting.base.v == v
        assert nesting.base.b == v * (v - 1) // 12


def test_weak_to_nested_bibd_rejects_bad_x():
    f = load_family("weak-v40")
    with pytest.raises(DesignError):
        weak_brdf_to_nested_bibd(f, 1)  # 1 sits in a base block


def test_short_orbit_nesting_4x13():
    f = load_family("brdf-4x13")
    nesting = brdf_short_orbit_nesting(f, (0, 0, 1))
    assert nesting.base.v == 52
    assert verify_nesting(nesting, 1).ok


def test_short_orbit_nesting_gf25():
    from nestkit.direct import construct_16tuple_brdf

    f, nesting = construct_16tuple_brdf(25)
    assert nesting.base.v == 100
    assert verify_nesting(nesting, 1).ok


def test_short_orbit_all_cosets_blocked():
    # the z15 family's blocks and negatives meet every nontrivial coset of H
    f = load_family("brdf-z15")
    assert qualifying_short_orbit_offsets(f) == []
    with pytest.raises(DesignError):
        brdf_short_orbit_nesting(f, 1)


def test_no_order_two_elements_in_strict_blocks():
    # property (3) forces elements of order two into H; check all catalog
    # strict families block-wise
    from nestkit.catalog import entries_of_kind

    for eid in entries_of_kind("BRDF"):
        f = load_family(eid)
        g = f.group
        for blk in f.blocks:
            for p in blk:
                assert not (g.add(p, p) == g.zero() and p != g.zero()), (eid, p)
