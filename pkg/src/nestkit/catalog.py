"""Embedded catalog of every explicit object the constructions rest on.

One JSON file per entry under catalog_data/, hash-pinned by index.json so
the data cannot drift silently.  `catalog_verify` runs the appropriate
verifier over each entry: difference families are checked axiom by axiom
and regenerated into their nested designs when they carry a suitable
point, explicit nestings are re-verified block by block, 16-tuples are
checked against the coset conditions, and recipe entries are checked for
arithmetic consistency and ingredient availability.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .designs import Design, DesignError, VerificationReport, verify_bibd
from .families import (
    DifferenceFamily,
    brdf_short_orbit_nesting,
    brdf_to_nested_bibd,
    brdf_to_nested_gdd,
    family,
    suitable_points,
    verify_family,
    weak_brdf_to_nested_bibd,
)
from .groups import make_group
from .nestings import Nesting, verify_nesting


class CatalogError(ValueError):
    pass


def _data_root():
    return resources.files("nestkit") / "catalog_data"


@lru_cache(maxsize=1)
def _index() -> dict[str, str]:
    with (_data_root() / "index.json").open("r") as fh:
        return json.load(fh)


@lru_cache(maxsize=None)
def raw_entry(entry_id: str) -> dict:
    """Load one entry, checking its pinned hash."""
    index = _index()
    if entry_id not in index:
        raise KeyError(f"no catalog entry {entry_id!r}")
    path = _data_root() / f"{entry_id}.json"
    blob = path.read_bytes()
    digest = hashlib.sha256(blob).hexdigest()
    if digest != index[entry_id]:
        raise CatalogError(f"catalog entry {entry_id!r} does not match its pinned hash")
    return json.loads(blob)


def entry_ids() -> list[str]:
    return sorted(_index())


def entries_of_kind(kind: str) -> list[str]:
    return [e for e in entry_ids() if raw_entry(e)["kind"] == kind]


# ---------------------------------------------------------------------------
# materialization


def _decode_point(p):
    return tuple(p) if isinstance(p, list) else p


def load_family(entry_id: str) -> DifferenceFamily:
    entry = raw_entry(entry_id)
    if entry["kind"] not in ("BRDF", "weak-BRDF"):
        raise CatalogError(f"{entry_id} is not a difference family")
    payload = entry["payload"]
    g = make_group(payload["group"])
    kind = "weak" if entry["kind"] == "weak-BRDF" else "brdf"
    return family(
        g,
        [_decode_point(p) for p in payload["subgroup"]],
        [[_decode_point(p) for p in blk] for blk in payload["blocks"]],
        kind=kind,
        lam=payload.get("lambda", 1),
    )


@dataclass
class Materialized:
    """What a catalog entry expands to, with its verification report."""

    entry_id: str
    kind: str
    report: VerificationReport
    family: DifferenceFamily | None = None
    nesting: Nesting | None = None


@lru_cache(maxsize=None)
def materialize(entry_id: str) -> Materialized:
    """Expand an entry into verified objects (cached per process)."""
    entry = raw_entry(entry_id)
    kind = entry["kind"]
    payload = entry["payload"]
    if kind in ("BRDF", "weak-BRDF"):
        return _materialize_family(entry_id, kind, payload)
    if kind == "nesting":
        return _materialize_nesting(entry_id, payload)
    if kind == "GDD-nesting":
        from .direct import develop_nesting_payload

        nesting = develop_nesting_payload(payload)
        report = verify_nesting(nesting, payload.get("lambda", 1))
        return Materialized(entry_id, kind, report, nesting=nesting)
    if kind == "16-tuple":
        return _materialize_tuple(entry_id, payload)
    if kind == "construction-recipe":
        return _materialize_recipe(entry_id, payload)
    raise CatalogError(f"unknown catalog kind {kind!r}")


def _materialize_family(entry_id: str, kind: str, payload: dict) -> Materialized:
    f = load_family(entry_id)
    report = verify_family(f)
    nesting = None
    if report.ok and "suitable_x" in payload:
        x = _decode_point(payload["suitable_x"])
        if x not in set(suitable_points(f)):
            report.ok = False
            report.problems.append({"reason": "pinned x is not suitable", "x": x})
        else:
            nesting = weak_brdf_to_nested_bibd(f, x)
    elif report.ok and "short_orbit_offset" in payload:
        nesting = brdf_short_orbit_nesting(f, _decode_point(payload["short_orbit_offset"]))
    elif report.ok and f.kind == "brdf":
        if f.subgroup.order == 1:
            nesting = brdf_to_nested_bibd(f)
        else:
            _, nesting = brdf_to_nested_gdd(f)
    return Materialized(entry_id, kind, report, family=f, nesting=nesting)


def _materialize_nesting(entry_id: str, payload: dict) -> Materialized:
    if "augmented_blocks" in payload:
        points = [_decode_point(p) for p in payload["points"]]
        blocks = []
        phi = []
        for blk in payload["augmented_blocks"]:
            decoded = [_decode_point(p) for p in blk]
            blocks.append(tuple(sorted(decoded[:-1])))
            phi.append(decoded[-1])
        base = Design(tuple(sorted(points)), tuple(blocks))
        nesting = Nesting(base, tuple(phi))
        report = verify_nesting(nesting, payload.get("lambda", 1))
        return Materialized(entry_id, "nesting", report, nesting=nesting)
    from .direct import develop_nesting_payload

    nesting = develop_nesting_payload(payload)
    report = verify_nesting(nesting, payload.get("lambda", 1))
    return Materialized(entry_id, "nesting", report, nesting=nesting)


def _materialize_tuple(entry_id: str, payload: dict) -> Materialized:
    from .direct import check_16tuple, decode_tuple, field_for

    fld = field_for(payload["q"])
    values = decode_tuple(fld, payload["tuple"])
    ok, witness = check_16tuple(fld, values)
    report = VerificationReport(ok, "16-tuple", {"q": payload["q"]})
    if not ok:
        report.problems.append(witness or {})
    return Materialized(entry_id, "16-tuple", report)


def _materialize_recipe(entry_id: str, payload: dict) -> Materialized:
    report = VerificationReport(True, "construction-recipe", {"v": payload["v"]})
    route = payload.get("route")
    if route == "hdm-fill":
        raw_entry(payload["fill"])  # must exist
        if payload["brdf"].startswith("search:"):
            g1_order = int(payload["brdf"].split(":", 1)[1])
        else:
            brdf = raw_entry(payload["brdf"])
            g1_order = make_group(brdf["payload"]["group"]).order
            if brdf["kind"] != "BRDF":
                report.ok = False
                report.problems.append({"reason": "product needs a strict family",
                                        "ingredient": payload["brdf"]})
        q = payload["hdm_q"]
        if g1_order * q != payload["v"]:
            report.ok = False
            report.problems.append({"reason": "order mismatch", "expected": payload["v"],
                                    "actual": g1_order * q})
        report.params.update({"g1": g1_order, "q": q, "fill": payload["fill"]})
    elif route == "rbibd-inflate":
        m, t = payload["m"], payload["t"]
        if 168 * m + 3 * t + 25 != payload["v"]:
            report.ok = False
            report.problems.append({"reason": "parameter mismatch"})
        if t % 4 != 1 or t < 5:
            report.ok = False
            report.problems.append({"reason": "t must be 1 mod 4 and at least 5"})
        report.params.update({"m": m, "t": t, "external": payload.get("external", [])})
    else:
        report.ok = False
        report.problems.append({"reason": f"unknown route {route!r}"})
    return Materialized(entry_id, "construction-recipe", report)


# ---------------------------------------------------------------------------
# the catalog-wide verification run


def catalog_verify(entry_id: str | None = None, kind: str | None = None) -> list[Materialized]:
    """Verify every entry (or a filtered subset); deterministic order."""
    ids = entry_ids()
    if entry_id is not None:
        if entry_id not in ids:
            raise KeyError(f"no catalog entry {entry_id!r}")
        ids = [entry_id]
    if kind is not None:
        ids = [e for e in ids if raw_entry(e)["kind"] == kind]
        if not ids:
            raise KeyError(f"no catalog entries of kind {kind!r}")
    return [materialize(e) for e in ids]


def nested_bibd_entry(v: int) -> str | None:
    """Catalog entry whose materialization is a nested (v,4,1)-BIBD."""
    table = {
        13: "table1-v13", 25: "table1-v25", 37: "table1-v37",
        49: "table1-v49", 61: "table1-v61", 16: "nested-16", 28: "nested-28",
        40: "weak-v40", 52: "brdf-v52",
    }
    if v in table:
        return table[v]
    for eid in (f"brdf-v{v}", f"weak-v{v}"):
        if eid in _index():
            return eid
    return None


def tuple_entry(q: int) -> str | None:
    eid = {25: "tuple-gf25", 49: "tuple-gf49", 121: "tuple-gf121"}.get(q, f"tuple-{q}")
    return eid if eid in _index() else None


def strict_family_index() -> list[tuple[int, int, str]]:
    """(|G|, |H|, id) for every catalog family satisfying the strict axioms,
    ordered by |G|; these are the product-construction ingredients."""
    out = []
    for eid in entries_of_kind("BRDF"):
        payload = raw_entry(eid)["payload"]
        g = make_group(payload["group"])
        out.append((g.order, len(payload["subgroup"]), eid))
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return out
