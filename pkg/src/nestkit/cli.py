"""Command-line umbrella.

Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 not found.
Every data-producing command accepts --output FILE and --format json|text.
"""

from __future__ import annotations

import argparse
import json
import sys

from .designs import DesignError, GroupDivisibleDesign, verify_bibd, verify_gdd
from .groups import GroupError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_NOT_FOUND = 3


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_INVALID
    try:
        return args.func(args)
    except (DesignError, GroupError, KeyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nestkit",
                                description="nested block designs and difference families")
    sub = p.add_subparsers(dest="command")

    def add_common(sp):
        sp.add_argument("--output", help="write the result to this file")
        sp.add_argument("--format", choices=["json", "text"], default="text")

    sp = sub.add_parser("verify", help="verify a design file")
    sp.add_argument("--file", required=True)
    sp.add_argument("--partial", action="store_true")
    sp.add_argument("--gdd", action="store_true")
    add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("verify-nesting", help="verify a nesting file")
    sp.add_argument("--file", required=True)
    sp.add_argument("--gdd", action="store_true")
    add_common(sp)
    sp.set_defaults(func=cmd_verify_nesting)

    sp = sub.add_parser("brdf", help="difference family operations")
    sp.add_argument("action", choices=["verify", "to-design", "suitable-x"])
    sp.add_argument("--file", required=True)
    sp.add_argument("--x", type=int, help="suitable point for the short orbit")
    sp.add_argument("--short-orbit-g", help="coset offset for |H|=k families")
    add_common(sp)
    sp.set_defaults(func=cmd_brdf)

    sp = sub.add_parser("construct", help="run a direct construction")
    sp.add_argument("what", choices=["theorem3", "tuple16", "gdd38", "v28"])
    sp.add_argument("--v", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--tuple", help="comma-separated 16 tuple entries")
    add_common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("compose", help="run a recursive construction")
    sp.add_argument("what", choices=["wilson", "tdtrunc", "rbibd", "hdm", "fill", "pbd"])
    sp.add_argument("--gdd-file", help="input GDD design file (wilson)")
    sp.add_argument("--family-file", help="input family file (fill)")
    sp.add_argument("--pbd-file", help="input PBD design file (pbd)")
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--t", type=int)
    add_common(sp)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("plan", help="plan (and optionally build) a nested design")
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--execute", action="store_true")
    sp.add_argument("--registry-dir")
    add_common(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("search", help="run a backtracking search")
    sp.add_argument("what", choices=["nesting", "brdf", "tuple16"])
    sp.add_argument("--v", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--group")
    sp.add_argument("--subgroup", help="comma-separated subgroup elements")
    sp.add_argument("--weak", action="store_true")
    sp.add_argument("--blocks", help="semicolon-separated base blocks (nesting)")
    sp.add_argument("--short-orbit", action="store_true")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--seed", type=int)
    add_common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("catalog", help="list or verify the embedded catalog")
    sp.add_argument("action", choices=["verify", "list", "show"])
    sp.add_argument("--id")
    sp.add_argument("--kind")
    add_common(sp)
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("spectrum", help="existence oracle for nested (v,4,1) designs")
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--registry-dir")
    add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("registry", help="manage the ingredient registry")
    sp.add_argument("action", choices=["add", "list"])
    sp.add_argument("file", nargs="?")
    sp.add_argument("--role", choices=["nested-bibd", "nested-gdd-3", "brdf", "td",
                                       "rbibd", "pbd"])
    sp.add_argument("--param", help="role parameter, e.g. 61 or 9,8")
    sp.add_argument("--registry-dir", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_registry)

    return p


def _emit(args, data: dict, text: str) -> None:
    from .fileio import dump_json

    if args.output:
        dump_json(data, args.output)
    if getattr(args, "format", "text") == "json":
        print(json.dumps(data, indent=1, sort_keys=True, default=str))
    else:
        print(text)


def _report_exit(report) -> int:
    return EXIT_OK if report.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .fileio import design_from_json, load_json

    d, _, params = design_from_json(load_json(args.file))
    lam = int(params.get("lambda", 1))
    k = params.get("k") or sorted(d.block_sizes())
    if args.gdd or isinstance(d, GroupDivisibleDesign):
        if not isinstance(d, GroupDivisibleDesign):
            print("error: --gdd needs a file with a group partition", file=sys.stderr)
            return EXIT_INVALID
        report = verify_gdd(d, k if isinstance(k, int) else set(k), lam, args.partial)
    else:
        report = verify_bibd(d, int(params.get("v", d.v)),
                             k if isinstance(k, int) else set(k), lam, args.partial)
    _emit(args, report.to_json(), report.summary())
    return _report_exit(report)


def cmd_verify_nesting(args) -> int:
    from .fileio import design_from_json, load_json
    from .nestings import verify_nesting

    _, nesting, params = design_from_json(load_json(args.file))
    if nesting is None:
        print("error: file is not marked \"nested\"", file=sys.stderr)
        return EXIT_INVALID
    report = verify_nesting(nesting, int(params.get("lambda", 1)))
    _emit(args, report.to_json(), report.summary())
    return _report_exit(report)


def cmd_brdf(args) -> int:
    from .families import (brdf_short_orbit_nesting, brdf_to_nested_bibd,
                           brdf_to_nested_gdd, suitable_points, verify_family,
                           weak_brdf_to_nested_bibd)
    from .fileio import (family_from_json, family_to_json, load_json,
                         nesting_to_json, parse_point)

    f = family_from_json(load_json(args.file))
    if args.action == "verify":
        report = verify_family(f)
        _emit(args, report.to_json(), report.summary())
        return _report_exit(report)
    if args.action == "suitable-x":
        xs = suitable_points(f)
        _emit(args, {"suitable": xs}, "suitable x: " + ", ".join(map(str, xs)))
        return EXIT_OK if xs else EXIT_NOT_FOUND
    # to-design
    if args.x is not None:
        nesting = weak_brdf_to_nested_bibd(f, args.x)
    elif args.short_orbit_g is not None:
        nesting = brdf_short_orbit_nesting(f, parse_point(args.short_orbit_g))
    elif f.subgroup.order == 1:
        nesting = brdf_to_nested_bibd(f)
    else:
        _, nesting = brdf_to_nested_gdd(f)
    data = nesting_to_json(nesting, group=f.group,
                           params={"v": f.group.order, "k": f.k, "lambda": f.lam})
    _emit(args, data, f"nested design on {nesting.base.v} points, {nesting.base.b} blocks")
    return EXIT_OK


def cmd_construct(args) -> int:
    from .direct import (construct_16tuple_brdf, construct_3v_brdf,
                         construct_nested_28, construct_nested_gdd_3_8, decode_tuple,
                         field_for)
    from .fileio import family_to_json, nesting_to_json

    if args.what == "theorem3":
        if args.v is None:
            print("error: theorem3 needs --v", file=sys.stderr)
            return EXIT_INVALID
        f = construct_3v_brdf(args.v)
        _emit(args, family_to_json(f),
              f"(3v,3,4,1) family over {f.group.descriptor()}: {len(f.blocks)} base blocks")
        return EXIT_OK
    if args.what == "tuple16":
        if args.q is None:
            print("error: tuple16 needs --q", file=sys.stderr)
            return EXIT_INVALID
        tup = None
        if args.tuple:
            tup = [int(x) for x in args.tuple.split(",")]
        f, nesting = construct_16tuple_brdf(args.q, tup)
        data = {"family": family_to_json(f),
                "nesting": nesting_to_json(nesting, group=f.group)}
        _emit(args, data, f"nested ({4 * args.q},4,1) design, {nesting.base.b} blocks")
        return EXIT_OK
    if args.what == "gdd38":
        _, nesting = construct_nested_gdd_3_8()
        data = nesting_to_json(nesting)
        _emit(args, data, f"nested (4,1)-GDD of type 3^8, {nesting.base.b} blocks")
        return EXIT_OK
    nesting = construct_nested_28()
    _emit(args, nesting_to_json(nesting), f"nested (28,4,1) design, {nesting.base.b} blocks")
    return EXIT_OK


def cmd_compose(args) -> int:
    from .compose import (default_registry, fill_groups, hdm_from_field,
                          hdm_product, rbibd_inflate, truncate_td, wilson_weight3)
    from .designs import affine_plane, transversal_design
    from .families import brdf_to_nested_gdd
    from .fileio import (design_from_json, design_to_json, family_from_json,
                         family_to_json, load_json, nesting_to_json)

    reg = default_registry()
    if args.what == "hdm":
        if args.q is None or args.k is None:
            print("error: hdm needs --q and --k", file=sys.stderr)
            return EXIT_INVALID
        m = hdm_from_field(args.q, args.k)
        data = {"field": m.fld.descriptor(), "rows": [list(r) for r in m.rows]}
        _emit(args, data, f"homogeneous ({m.fld.descriptor()},{m.k},1) difference matrix")
        return EXIT_OK
    if args.what == "tdtrunc":
        if args.m is None or args.t is None:
            print("error: tdtrunc needs --m and --t", file=sys.stderr)
            return EXIT_INVALID
        td = transversal_design(args.k or 9, args.m)
        g = truncate_td(td, args.t)
        _emit(args, design_to_json(g), f"GDD of type {g.type_string()}, {g.b} blocks")
        return EXIT_OK
    if args.what == "rbibd":
        if args.t is None:
            print("error: rbibd needs --t", file=sys.stderr)
            return EXIT_INVALID
        g = rbibd_inflate(affine_plane(8), args.t)
        _emit(args, design_to_json(g), f"GDD of type {g.type_string()}, {g.b} blocks")
        return EXIT_OK
    if args.what == "wilson":
        if not args.gdd_file:
            print("error: wilson needs --gdd-file", file=sys.stderr)
            return EXIT_INVALID
        d, _, _ = design_from_json(load_json(args.gdd_file))
        if not isinstance(d, GroupDivisibleDesign):
            print("error: wilson input must carry a group partition", file=sys.stderr)
            return EXIT_INVALID
        nesting = wilson_weight3(d, reg)
        _emit(args, nesting_to_json(nesting),
              f"nested ({nesting.base.v},4,1) design, {nesting.base.b} blocks")
        return EXIT_OK
    if args.what == "fill":
        if not args.family_file:
            print("error: fill needs --family-file", file=sys.stderr)
            return EXIT_INVALID
        f = family_from_json(load_json(args.family_file))
        _, gdd_nesting = brdf_to_nested_gdd(f)
        nesting = fill_groups(gdd_nesting, reg)
        _emit(args, nesting_to_json(nesting),
              f"nested ({nesting.base.v},4,1) design, {nesting.base.b} blocks")
        return EXIT_OK
    # pbd closure
    if not args.pbd_file:
        print("error: pbd needs --pbd-file", file=sys.stderr)
        return EXIT_INVALID
    from .compose import pbd_closure

    d, _, _ = design_from_json(load_json(args.pbd_file))
    nesting = pbd_closure(d, reg)
    _emit(args, nesting_to_json(nesting),
          f"nested ({nesting.base.v},4,1) design, {nesting.base.b} blocks")
    return EXIT_OK


def cmd_plan(args) -> int:
    from .fileio import nesting_to_json
    from .planner import Planner

    planner = Planner(registry=_load_registry(args.registry_dir))
    recipe = planner.plan(args.v)
    data = recipe.to_json()
    if args.execute:
        if not recipe.executable:
            _emit(args, data, recipe.describe())
            return EXIT_NOT_FOUND
        nesting = planner.build(args.v)
        data = {"recipe": recipe.to_json(), "design": nesting_to_json(nesting)}
        _emit(args, data,
              recipe.describe() + f"\nbuilt and verified: {nesting.base.b} blocks")
        return EXIT_OK
    _emit(args, data, recipe.describe())
    return EXIT_OK if recipe.executable else EXIT_NOT_FOUND


def cmd_search(args) -> int:
    from .fileio import family_to_json, nesting_to_json
    from .search import (DEFAULT_BRDF_BUDGET, DEFAULT_NESTING_BUDGET,
                         DEFAULT_TUPLE_BUDGET, find_16tuple, find_base_nesting,
                         find_brdf)

    if args.what == "brdf":
        if not args.group:
            print("error: search brdf needs --group", file=sys.stderr)
            return EXIT_INVALID
        sub_elems = None
        if args.subgroup:
            sub_elems = [int(x) for x in args.subgroup.split(",")]
        result = find_brdf(args.group, sub_elems, weak=args.weak,
                           budget=DEFAULT_BRDF_BUDGET if args.budget is None else args.budget, seed=args.seed)
        if not result.ok:
            _emit(args, {"found": False, "nodes": result.nodes,
                         "exhausted": result.exhausted}, "NOT_FOUND")
            return EXIT_NOT_FOUND
        _emit(args, family_to_json(result.found),
              f"family with {len(result.found.blocks)} blocks ({result.nodes} nodes)")
        return EXIT_OK
    if args.what == "tuple16":
        if args.q is None:
            print("error: search tuple16 needs --q", file=sys.stderr)
            return EXIT_INVALID
        result = find_16tuple(args.q, budget=DEFAULT_TUPLE_BUDGET if args.budget is None else args.budget,
                              seed=args.seed)
        if not result.ok:
            _emit(args, {"found": False, "nodes": result.nodes,
                         "exhausted": result.exhausted}, "NOT_FOUND")
            return EXIT_NOT_FOUND
        _emit(args, {"q": args.q, "tuple": result.found},
              "tuple: " + ",".join(map(str, result.found)))
        return EXIT_OK
    # nesting
    if args.v is None or not args.blocks:
        print("error: search nesting needs --v and --blocks", file=sys.stderr)
        return EXIT_INVALID
    blocks = [[int(x) for x in blk.split(",")] for blk in args.blocks.split(";")]
    result = find_base_nesting(args.v, blocks, short_orbit=args.short_orbit,
                               budget=DEFAULT_NESTING_BUDGET if args.budget is None else args.budget,
                               seed=args.seed)
    if not result.ok:
        _emit(args, {"found": False, "nodes": result.nodes,
                     "exhausted": result.exhausted}, "NOT_FOUND")
        return EXIT_NOT_FOUND
    data = {"nested_points": result.found["nested_points"],
            "design": nesting_to_json(result.found["nesting"])}
    _emit(args, data, "nested points: " + ",".join(map(str, result.found["nested_points"])))
    return EXIT_OK


def cmd_catalog(args) -> int:
    from . import catalog

    if args.action == "list":
        rows = [f"{e:18s} {catalog.raw_entry(e)['kind']:20s} {catalog.raw_entry(e)['source']}"
                for e in catalog.entry_ids()]
        _emit(args, {"entries": catalog.entry_ids()}, "\n".join(rows))
        return EXIT_OK
    if args.action == "show":
        if not args.id:
            print("error: show needs --id", file=sys.stderr)
            return EXIT_INVALID
        entry = catalog.raw_entry(args.id)
        _emit(args, entry, json.dumps(entry, indent=1, sort_keys=True))
        return EXIT_OK
    results = catalog.catalog_verify(entry_id=args.id, kind=args.kind)
    lines = []
    failures = 0
    for m in results:
        status = "PASS" if m.report.ok else "FAIL"
        if not m.report.ok:
            failures += 1
        lines.append(f"{status} {m.entry_id} ({m.kind})")
    lines.append(f"{len(results)} entries, {failures} failures")
    _emit(args, {"results": [{"id": m.entry_id, "ok": m.report.ok} for m in results],
                 "failures": failures}, "\n".join(lines))
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_spectrum(args) -> int:
    from .planner import Planner, spectrum

    planner = Planner(registry=_load_registry(args.registry_dir))
    out = spectrum(args.v, planner)
    data = dict(out)
    if "recipe" in data:
        data["recipe"] = data["recipe"].to_json()
    if out["status"] == "EXISTS":
        text = f"v={args.v}: EXISTS" + ("" if out["executable"] else " (recipe needs external ingredients)")
        text += "\n" + out["recipe"].describe()
    else:
        text = f"v={args.v}: IMPOSSIBLE ({out['reason']})"
    _emit(args, data, text)
    return EXIT_OK


def cmd_registry(args) -> int:
    from .registry_store import add_to_store, list_store

    if args.action == "list":
        rows = list_store(args.registry_dir)
        _emit(args, {"entries": rows},
              "\n".join(f"{r['role']} {r['param']} <- {r['file']}" for r in rows))
        return EXIT_OK
    if not args.file or not args.role or args.param is None:
        print("error: registry add needs FILE --role --param", file=sys.stderr)
        return EXIT_INVALID
    param = _parse_param(args.param)
    entry = add_to_store(args.registry_dir, args.file, args.role, param)
    _emit(args, entry, f"registered {args.role} {param}")
    return EXIT_OK


def _parse_param(raw: str):
    if "," in raw:
        return tuple(int(x) for x in raw.split(","))
    return int(raw)


def _load_registry(registry_dir):
    from .compose import default_registry
    from .registry_store import load_store

    reg = default_registry()
    if registry_dir:
        load_store(registry_dir, reg)
    return reg


if __name__ == "__main__":
    sys.exit(main())
