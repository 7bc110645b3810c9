"""Recipe planning, execution and the spectrum oracle."""

from __future__ import annotations

import pytest

from nestkit.designs import DesignError
from nestkit.planner import Planner, spectrum


def test_plan_prefers_catalog():
    p = Planner()
    r = p.plan(61)
    assert r.kind == "catalog" and r.params["id"] == "table1-v61"


def test_plan_208_uses_resolvable_route():
    p = Planner()
    r = p.plan(208)
    assert r.kind == "wilson"
    assert r.params["gdd"] == "rbibd-inflate(m=1,t=5)"
    assert r.executable


def test_plan_rejects_out_of_spectrum():
    p = Planner()
    with pytest.raises(DesignError):
        p.plan(10)


def test_plan_external_recipes_flagged():
    p = Planner()
    r = p.plan(568)
    assert not r.executable
    assert any("resolvable" in e for e in r.external)


def test_build_small_values():
    p = Planner()
    for v in [13, 16, 61, 73, 121]:
        n = p.build(v)
        assert n.base.v == v and n.base.b == v * (v - 1) // 12


def test_build_respects_memo():
    p = Planner()
    a = p.build(16)
    b = p.build(16)
    assert a is b


def test_spectrum_answers():
    p = Planner()
    s = spectrum(16, p)
    assert s["status"] == "EXISTS" and s["recipe"].params["id"] == "nested-16"

    s = spectrum(10, p)
    assert s["status"] == "IMPOSSIBLE" and "v(v-1)/12" in s["reason"]

    s = spectrum(1924, p)
    assert s["status"] == "EXISTS"  # the written decomposition v = 3(8m+t)+1

    s = spectrum(4, p)
    assert s["status"] == "IMPOSSIBLE"


def test_registry_pbd_route():
    """Ingesting an affine plane as a PBD unlocks the delete-a-point route."""
    from nestkit.compose import default_registry
    from nestkit.designs import affine_plane

    reg = default_registry()
    plane, _ = affine_plane(5)
    reg.add("pbd", 25, plane)
    p = Planner(registry=reg)
    r = p.plan(73)
    assert r.executable
    n = p.build(73)
    assert n.base.v == 73


def test_registry_rbibd_route():
    """A registered resolvable (120,8,1) design would unlock v=376 via
    inflation; the registry path is exercised with the built-in m=1 case."""
    from nestkit.compose import default_registry
    from nestkit.designs import affine_plane

    reg = default_registry()
    reg.add("rbibd", 64, affine_plane(8))
    p = Planner(registry=reg)
    r = p.plan(208)
    assert r.executable and r.params["m"] == 1
