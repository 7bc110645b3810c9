"""Parametric direct constructions and the bespoke small objects.

Two families carry most of the weight:

* a (Z_3 x R_v, Z_3 x {0}, 4, 1)-BRDF whenever every maximal prime power
  factor of v is 1 mod 4, built from a fourth root of unity x and orbit
  representatives S of U = {1, x, -1, -x} via the blocks
  B_s = {(1,s), (1,-s), (2,sx), (2,-sx)};

* a (F_4 x F_q, F_4 x {0}, 4, 1)-BRDF for prime powers q = 1 mod 12 from a
  16-tuple whose difference lists hit the cosets of the index-6 subgroup
  C^6 as complete systems and whose entry lists hit them as partial
  systems; the nested (4q,4,1)-BIBD follows by adding the cosets of H as a
  short orbit nested inside an untouched coset.

F_4 is used additively only and is realized as Z_2 x Z_2 with elements
written as bit pairs.
"""

from __future__ import annotations

from .designs import (
    Design,
    DesignError,
    GroupDivisibleDesign,
    full_orbit,
    develop,
    sort_block,
    subgroup_orbit,
)
from .families import DifferenceFamily, brdf_short_orbit_nesting, family, verify_brdf
from .groups import (
    FiniteField,
    GroupError,
    coset_of,
    coset_system_check,
    factorize,
    fourth_root,
    index6_cosets,
    make_group,
    orbit_representatives,
    product_ring_for,
)
from .nestings import Nesting, verify_nesting


def field_for(q: int) -> FiniteField:
    """GF(q) under the pinned representation (see groups.PINNED_POLYS)."""
    fac = factorize(q)
    if len(fac) != 1:
        raise GroupError(f"{q} is not a prime power")
    (p, d), = fac.items()
    return FiniteField(p, d)


# ---------------------------------------------------------------------------
# triple-cover construction


def construct_3v_brdf(v: int) -> DifferenceFamily:
    """(3v, 3, 4, 1)-BRDF over Z_3 x R_v with (v-1)/4 base blocks.

    Requires every maximal prime power factor of v to be 1 mod 4 (v = 21
    is the first value this misses).  The emitted family is re-verified
    before it is returned.
    """
    if v < 5:
        raise DesignError(f"v={v} is too small")
    offenders = [p**a for p, a in factorize(v).items() if (p**a) % 4 != 1]
    if offenders:
        raise DesignError(
            f"maximal prime power factor(s) {offenders} of {v} are not 1 mod 4")
    ring = product_ring_for(v)
    x = fourth_root(ring)
    reps = orbit_representatives(ring, x)
    g = make_group("Z3x" + ring.descriptor())

    def emb(z3: int, r) -> tuple:
        return (z3,) + (r if isinstance(r, tuple) else (r,))

    blocks = []
    for s in reps:
        sx = ring.mul(s, x)
        blocks.append((emb(1, s), emb(1, ring.neg(s)), emb(2, sx), emb(2, ring.neg(sx))))
    h = [emb(z, ring.zero()) for z in range(3)]
    f = family(g, h, blocks, kind="brdf")
    report = verify_brdf(f)
    if not report.ok:
        raise DesignError(f"construction failed verification: {report.first_problem()}")
    return f


# ---------------------------------------------------------------------------
# 16-tuple construction over F_4 x F_q


# index pairs (i, j) meaning a_i - a_j, 1-based as printed
DELTA_INDEX = {
    (0, 0): [(1, 2), (5, 6), (10, 11), (10, 12), (11, 12), (15, 16)],
    (0, 1): [(1, 3), (2, 3), (5, 7), (6, 7), (14, 15), (14, 16)],
    (1, 0): [(1, 4), (2, 4), (5, 8), (6, 8), (13, 15), (13, 16)],
    (1, 1): [(3, 4), (7, 8), (9, 10), (9, 11), (9, 12), (13, 14)],
}
U_INDEX = {
    (0, 0): [1, 2, 5, 6, 9],
    (0, 1): [3, 7, 13],
    (1, 0): [4, 8, 14],
    (1, 1): [10, 11, 12, 15, 16],
}
# rows: (f4 part, tuple slot) for the four base blocks
BLOCK_SLOTS = [
    [((0, 0), 1), ((0, 0), 2), ((0, 1), 3), ((1, 0), 4)],
    [((0, 0), 5), ((0, 0), 6), ((0, 1), 7), ((1, 0), 8)],
    [((0, 0), 9), ((1, 1), 10), ((1, 1), 11), ((1, 1), 12)],
    [((0, 1), 13), ((1, 0), 14), ((1, 1), 15), ((1, 1), 16)],
]


def delta_lists(fld: FiniteField, a: list[int]) -> dict[tuple[int, int], list[int]]:
    return {
        key: [fld.sub(a[i - 1], a[j - 1]) for i, j in pairs]
        for key, pairs in DELTA_INDEX.items()
    }


def u_lists(a: list[int]) -> dict[tuple[int, int], list[int]]:
    return {key: [a[i - 1] for i in idx] for key, idx in U_INDEX.items()}


def check_16tuple(fld: FiniteField, a: list[int]) -> tuple[bool, dict | None]:
    """Conditions (i)/(ii): each difference list is a complete system of
    coset representatives of C^6 and each entry list a partial one."""
    c6, cosets = index6_cosets(fld)
    for key, values in delta_lists(fld, a).items():
        ok, witness = coset_system_check(values, c6, cosets, "complete")
        if not ok:
            return False, {"list": f"delta{key}", **(witness or {})}
    for key, values in u_lists(a).items():
        ok, witness = coset_system_check(values, c6, cosets, "partial")
        if not ok:
            return False, {"list": f"u{key}", **(witness or {})}
    return True, None


def construct_16tuple_brdf(
    q: int, tuple16: list[int] | None = None
) -> tuple[DifferenceFamily, Nesting]:
    """Verified (F_4 x F_q, F_4 x {0}, 4, 1)-BRDF plus its nested
    (4q,4,1)-BIBD, from a good 16-tuple (catalog default)."""
    fld = field_for(q)
    if q % 12 != 1:
        raise DesignError(f"q={q} is not 1 mod 12")
    if tuple16 is None:
        tuple16 = _catalog_tuple(q)
    a = list(tuple16)
    if len(a) != 16 or any(not (0 < x < q) for x in a):
        raise DesignError("need 16 nonzero field elements")
    ok, witness = check_16tuple(fld, a)
    if not ok:
        raise DesignError(f"tuple fails the coset conditions: {witness}")
    c6, _ = index6_cosets(fld)
    reps = []
    seen: set[int] = set()
    for c in sorted(c6):
        if c not in seen:
            reps.append(c)
            seen.add(c)
            seen.add(fld.neg(c))
    g = make_group(f"Z2xZ2x{fld.descriptor()}")
    blocks = []
    for slots in BLOCK_SLOTS:
        base = [(f4[0], f4[1], a[i - 1]) for f4, i in slots]
        for s in reps:
            blocks.append(tuple((b0, b1, fld.mul(c, s)) for b0, b1, c in base))
    h = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)]
    f = family(g, h, blocks, kind="brdf")
    report = verify_brdf(f)
    if not report.ok:
        raise DesignError(f"family failed verification: {report.first_problem()}")
    x = min(c6)
    nesting = brdf_short_orbit_nesting(f, (0, 0, x))
    return f, nesting


def _catalog_tuple(q: int) -> list[int]:
    from .catalog import raw_entry

    entry_id = {25: "tuple-gf25", 49: "tuple-gf49", 121: "tuple-gf121"}.get(q, f"tuple-{q}")
    try:
        payload = raw_entry(entry_id)["payload"]
    except KeyError:
        raise DesignError(f"no catalog 16-tuple for q={q}") from None
    return decode_tuple(field_for(q), payload["tuple"])


def decode_tuple(fld: FiniteField, raw: list) -> list[int]:
    """Catalog tuples store prime-field elements as ints and extension-field
    elements as ascending coefficient lists."""
    return [fld.encode(x) if isinstance(x, list) else x for x in raw]


# ---------------------------------------------------------------------------
# bespoke small nestings (data lives in the catalog files)


def construct_nested_28() -> Nesting:
    """Nested (28,4,1)-BIBD on Z_3^3 plus a fixed point."""
    from .catalog import raw_entry

    payload = raw_entry("nested-28")["payload"]
    return develop_nesting_payload(payload)


def construct_nested_gdd_3_8() -> tuple[GroupDivisibleDesign, Nesting]:
    """Nested (4,1)-GDD of type 3^8 on Z_21 plus three infinite points."""
    from .catalog import raw_entry

    payload = raw_entry("gdd-3x8")["payload"]
    nesting = develop_nesting_payload(payload)
    return nesting.base, nesting  # type: ignore[return-value]


def develop_nesting_payload(payload: dict) -> Nesting:
    """Build and verify a nesting from an orbit-style catalog payload."""
    g = make_group(payload["group"])

    def decode(p):
        if isinstance(p, str):
            return p
        if isinstance(p, list):
            return tuple(p)
        return p

    blocks = []
    phi = []
    for orbit in payload["orbits"]:
        base = tuple(decode(p) for p in orbit["block"])
        nested = decode(orbit["nested"])
        action = orbit.get("infinity_action", "none")
        if orbit["translations"] == "full":
            spec = full_orbit(g, base + (nested,), action)
        else:
            translations = tuple(decode(t) for t in orbit["translations"])
            spec = subgroup_orbit(g, base + (nested,), translations, action)
        for t in spec.translations[: spec.count]:
            from .designs import translate_point

            blk = sort_block(translate_point(g, p, t, action) for p in base)
            blocks.append(blk)
            phi.append(translate_point(g, nested, t, action))
    inf_points = list(payload.get("infinity_group", []))
    if any(isinstance(p, str) for blk in blocks for p in blk) and not inf_points:
        inf_points = ["inf"]
    points = sorted(g.elements(), key=g.index) + sorted(inf_points)
    order = sorted(range(len(blocks)), key=lambda i: _blk_key(blocks[i], phi[i]))
    blocks = [blocks[i] for i in order]
    phi = [phi[i] for i in order]
    if "subgroup" in payload and "infinity_group" in payload:
        from .groups import subgroup

        h = subgroup(g, [decode(p) for p in payload["subgroup"]])
        groups = list(h.cosets()) + [tuple(sorted(payload["infinity_group"]))]
        base_design: Design = GroupDivisibleDesign(tuple(points), tuple(blocks), tuple(groups))
    else:
        base_design = Design(tuple(points), tuple(blocks))
    nesting = Nesting(base_design, tuple(phi))
    report = verify_nesting(nesting, 1)
    if not report.ok:
        raise DesignError(f"developed nesting does not verify: {report.first_problem()}")
    return nesting


def _blk_key(blk, nested):
    from .designs import point_key

    return tuple(point_key(p) for p in blk) + (point_key(nested),)
