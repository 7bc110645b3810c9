"""Direct constructions: the triple cover, 16-tuple families, bespoke objects."""

from __future__ import annotations

import pytest

from nestkit.catalog import raw_entry
from nestkit.designs import DesignError, translate_block
from nestkit.direct import (
    check_16tuple,
    construct_16tuple_brdf,
    construct_3v_brdf,
    construct_nested_28,
    construct_nested_gdd_3_8,
    decode_tuple,
    field_for,
    u_lists,
)
from nestkit.families import verify_brdf
from nestkit.groups import coset_of, index6_cosets, make_group
from nestkit.nestings import apply_nesting, verify_nesting


def test_triple_cover_v5():
    f = construct_3v_brdf(5)
    assert len(f.blocks) == 1
    assert f.group.descriptor() == "Z3xGF(5)"
    assert verify_brdf(f).ok


def test_triple_cover_v45():
    f = construct_3v_brdf(45)
    assert len(f.blocks) == 11 == (45 - 1) // 4
    assert f.group.order == 135


def test_triple_cover_v13():
    f = construct_3v_brdf(13)
    assert len(f.blocks) == 3
    assert f.group.order == 39 and f.subgroup.order == 3


def test_triple_cover_rejects_v21():
    with pytest.raises(DesignError):
        construct_3v_brdf(21)


def test_triple_cover_difference_identity():
    """The covered differences are exactly (Z_3 x R_v) minus (Z_3 x {0}),
    each once, and blocks plus negatives tile {1,2} x (R_v minus 0)."""
    f = construct_3v_brdf(13)
    g = f.group
    diffs = []
    for blk in f.blocks:
        for a in blk:
            for b in blk:
                if a != b:
                    diffs.append(g.sub(a, b))
    target = [e for e in g.elements() if e[1:] != (0,) * (len(e) - 1)]
    assert sorted(diffs, key=g.index) == sorted(target, key=g.index)
    union = [p for blk in f.blocks for p in blk]
    union += [p for blk in f.negatives() for p in blk]
    expect = [e for e in g.elements() if e[0] in (1, 2) and e[1:] != (0,) * (len(e) - 1)]
    assert sorted(union, key=g.index) == sorted(expect, key=g.index)


def test_tuple16_q13_reproduces_published_blocks():
    f, nesting = construct_16tuple_brdf(13)
    assert len(f.blocks) == 4 == (13 - 1) // 3
    want = {
        ((0, 0, 2), (0, 0, 3), (0, 1, 5), (1, 0, 7)),
        ((0, 0, 4), (0, 0, 6), (0, 1, 11), (1, 0, 3)),
        ((0, 0, 5), (1, 1, 2), (1, 1, 9), (1, 1, 6)),
        ((0, 1, 3), (1, 0, 9), (1, 1, 5), (1, 1, 10)),
    }
    assert {tuple(sorted(b)) for b in f.blocks} == {tuple(sorted(b)) for b in want}
    assert nesting.base.v == 52


def test_tuple16_q37():
    f, nesting = construct_16tuple_brdf(37)
    assert len(f.blocks) == 12 == (37 - 1) // 3
    assert nesting.base.v == 148
    assert nesting.base.b == 148 * 147 // 12


def test_tuple16_bad_tuple_reports_witness():
    with pytest.raises(DesignError) as err:
        construct_16tuple_brdf(13, [1] * 16)
    assert "coset" in str(err.value)


def test_tuple16_entry_coset_profile():
    """Entry lists cover five cosets over the (0,0)/(1,1) parts and three
    over (0,1)/(1,0), so blocks+negatives tile full cosets."""
    for q in [13, 37, 25]:
        fld = field_for(q)
        raw = raw_entry({25: "tuple-gf25"}.get(q, f"tuple-{q}"))["payload"]["tuple"]
        tup = decode_tuple(fld, raw)
        _, cosets = index6_cosets(fld)
        lists = u_lists(tup)
        assert len({coset_of(x, cosets) for x in lists[(0, 0)]}) == 5
        assert len({coset_of(x, cosets) for x in lists[(1, 1)]}) == 5
        assert len({coset_of(x, cosets) for x in lists[(0, 1)]}) == 3
        assert len({coset_of(x, cosets) for x in lists[(1, 0)]}) == 3


def test_gdd_3x8():
    d, nesting = construct_nested_gdd_3_8()
    assert d.b == 42
    assert d.type_string() == "3^8"
    groups = {tuple(g) for g in d.groups}
    assert ("inf0", "inf1", "inf2") in groups
    assert (0, 7, 14) in groups
    report = verify_nesting(nesting, 1)
    assert report.ok and report.params["type"] == "3^8"


def test_nested_28():
    nesting = construct_nested_28()
    assert nesting.base.v == 28
    assert nesting.base.b == 63 == 28 * 27 // 12
    assert verify_nesting(nesting, 1).ok


def test_nested_28_automorphism():
    """Translation by (0,1,0) permutes the augmented block multiset."""
    nesting = construct_nested_28()
    g = make_group("Z3xZ3xZ3")
    aug = apply_nesting(nesting)
    blocks = {tuple(sorted(b[:-1], key=_key)) + (b[-1],) for b in aug.blocks}
    shifted = set()
    for b in blocks:
        moved = translate_block(g, b[:-1], (0, 1, 0), "fixed")
        nested = translate_block(g, (b[-1],), (0, 1, 0), "fixed")[0]
        shifted.add(tuple(moved) + (nested,))
    assert shifted == blocks


def _key(p):
    from nestkit.designs import point_key

    return point_key(p)
