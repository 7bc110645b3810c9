"""Recursive constructions: inflation, truncation, products, filling, closure."""

from __future__ import annotations

import pytest

from nestkit.catalog import load_family, materialize
from nestkit.compose import (
    IngredientRegistry,
    MissingIngredient,
    default_registry,
    fill_groups,
    hdm_from_field,
    hdm_product,
    pbd_closure,
    rbibd_inflate,
    truncate_td,
    wilson_weight3,
)
from nestkit.designs import (
    Design,
    DesignError,
    affine_plane,
    design,
    transversal_design,
    verify_gdd,
)
from nestkit.families import brdf_to_nested_gdd
from nestkit.nestings import verify_nesting


def test_wilson_td54_gives_61():
    reg = default_registry()
    td = transversal_design(5, 4)
    nesting = wilson_weight3(td, reg)
    assert nesting.base.v == 61
    # block accounting: 16 blocks x 15 (type 3^5 ingredient) + 5 groups x 13
    assert nesting.base.b == 16 * 15 + 5 * 13 == 305 == 61 * 60 // 12


def test_wilson_missing_ingredient_names_gap():
    reg = IngredientRegistry(builtins=False)
    td = transversal_design(5, 4)
    with pytest.raises(MissingIngredient) as err:
        wilson_weight3(td, reg)
    assert "3^5" in str(err.value)


def test_wilson_missing_group_ingredient():
    reg = IngredientRegistry(builtins=False)
    reg.add("nested-gdd-3", 5, materialize_gdd35())
    td = transversal_design(5, 4)
    with pytest.raises(MissingIngredient) as err:
        wilson_weight3(td, reg)
    assert "(13,4,1)" in str(err.value)


def materialize_gdd35():
    from nestkit.direct import construct_3v_brdf

    _, nesting = brdf_to_nested_gdd(construct_3v_brdf(5))
    return nesting


def test_truncate_td98():
    td = transversal_design(9, 8)
    g5 = truncate_td(td, 5)
    assert g5.type_string() == "8^8 5^1"
    assert verify_gdd(g5, {8, 9}, 1).ok

    assert truncate_td(td, 8).type_string() == "8^9"
    assert truncate_td(td, 0).type_string() == "8^8"
    with pytest.raises(DesignError):
        truncate_td(td, 9)


def test_rbibd_inflate_structure():
    resolvable = affine_plane(8)
    g = rbibd_inflate(resolvable, 5)
    assert g.type_string() == "8^8 5^1"
    # group count 7m+2 including the added-point group; block sizes in {8,9}
    assert len(g.groups) == 7 * 1 + 2
    assert g.block_sizes() <= {8, 9}

    g0 = rbibd_inflate(resolvable, 0)
    assert g0.type_string() == "8^8"
    assert len(g0.groups) == 8  # the empty added-point group is dropped


def test_rbibd_inflate_warns_on_bad_t():
    # t = 2,3 mod 4 leaves the spectrum entirely; t = 0 mod 4 is fine (v = 1 mod 12)
    resolvable = affine_plane(8)
    with pytest.warns(UserWarning):
        rbibd_inflate(resolvable, 2)


def test_rbibd_then_wilson_gives_208():
    reg = default_registry()
    g = rbibd_inflate(affine_plane(8), 5)
    nesting = wilson_weight3(g, reg)
    assert nesting.base.v == 208 == 168 * 1 + 3 * 5 + 25
    assert nesting.base.b == 208 * 207 // 12


def test_hdm_from_field():
    m = hdm_from_field(7, 4)
    assert m.rows == tuple(tuple((a * c) % 7 for c in range(7)) for a in range(1, 5))
    # brute-force both axioms
    for i in range(4):
        assert sorted(m.rows[i]) == list(range(7))
        for j in range(i + 1, 4):
            diffs = sorted((a - b) % 7 for a, b in zip(m.rows[i], m.rows[j]))
            assert diffs == list(range(7))

    assert hdm_from_field(13, 4).k == 4
    assert hdm_from_field(5, 4).k == 4  # k = q-1 boundary
    with pytest.raises(DesignError):
        hdm_from_field(5, 5)


def test_hdm_product_rows():
    f40 = load_family("brdf-v40")
    f280 = hdm_product(f40, hdm_from_field(7, 4))
    assert f280.group.order == 280 and f280.subgroup.order == 28
    assert len(f280.blocks) == 3 * 7

    f520 = hdm_product(f40, hdm_from_field(13, 4))
    assert f520.group.order == 520 and f520.subgroup.order == 52

    f364 = hdm_product(load_family("brdf-v52"), hdm_from_field(7, 4))
    assert f364.group.order == 364 and f364.subgroup.order == 28


def test_hdm_product_rejects_weak():
    weak = load_family("weak-v40")
    with pytest.raises(DesignError):
        hdm_product(weak, hdm_from_field(7, 4))


def test_fill_groups_280():
    reg = default_registry()
    f280 = hdm_product(load_family("brdf-v40"), hdm_from_field(7, 4))
    _, gdd_nesting = brdf_to_nested_gdd(f280)
    nesting = fill_groups(gdd_nesting, reg)
    assert nesting.base.v == 280
    assert nesting.base.b == 280 * 279 // 12


def test_fill_groups_type1_noop():
    f = load_family("table1-v13")
    _, gdd_nesting = brdf_to_nested_gdd(f)
    reg = IngredientRegistry(builtins=False)  # nothing needed for size-1 groups
    nesting = fill_groups(gdd_nesting, reg)
    assert nesting.base.b == gdd_nesting.base.b


def test_fill_groups_missing_ingredient():
    reg = IngredientRegistry(builtins=False)
    f280 = hdm_product(load_family("brdf-v40"), hdm_from_field(7, 4))
    _, gdd_nesting = brdf_to_nested_gdd(f280)
    with pytest.raises(MissingIngredient):
        fill_groups(gdd_nesting, reg)


def test_pbd_closure_single_block():
    reg = default_registry()
    d = design(range(1, 17), [list(range(1, 17))])
    nesting = pbd_closure(d, reg)
    ingredient = materialize("nested-16").nesting
    assert nesting.base.b == ingredient.base.b == 20


def test_pbd_closure_missing_ingredient():
    reg = default_registry()
    from nestkit.designs import develop, full_orbit
    from nestkit.groups import make_group

    g = make_group("Z13")
    d = design(g.elements(), develop([full_orbit(g, (1, 2, 4, 10))], g))
    with pytest.raises(MissingIngredient) as err:
        pbd_closure(d, reg)  # no nested (4,4,1) design can exist
    assert "(4,4,1)" in str(err.value)


def test_registry_rejects_bad_ingredient():
    reg = IngredientRegistry(builtins=False)
    bad = Design((0, 1, 2, 3), ((0, 1, 2),))
    with pytest.raises(DesignError):
        reg.add("pbd", 4, bad)
