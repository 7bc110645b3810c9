"""Design, nesting and difference-family file formats.

Design files are JSON:

    {"group": "<descriptor>" | "labels",
     "points": [...],                  # canonical element syntax
     "groups": [[...], ...],           # optional partition
     "blocks": [[...], ...],
     "params": {"v": .., "k": .., "lambda": ..},
     "nested": true}                   # last element of each block is phi(A)

Family files:

    {"group": "Z40", "subgroup": [0, 10, 20, 30], "k": 4, "lambda": 1,
     "kind": "weak", "blocks": [[2, 1, 16, 10], ...]}

Group elements render as ints over a single-factor group and as strings
"(a,b,c)" over products; composite labels (from the recursive
constructions) render as nested tuples and infinity labels stay strings.
Rendering and parsing round-trip bit-exactly.
"""

from __future__ import annotations

import json
import re

from .designs import Design, DesignError, GroupDivisibleDesign
from .families import DifferenceFamily, family
from .groups import FiniteGroup, make_group
from .nestings import Nesting


def render_point(p) -> int | str:
    if isinstance(p, int):
        return p
    if isinstance(p, str):
        return p
    return "(" + ",".join(str(render_point(c)) for c in p) + ")"


def parse_point(raw):
    if isinstance(raw, int):
        return raw
    if isinstance(raw, list):
        return tuple(parse_point(c) for c in raw)
    if isinstance(raw, str):
        s = raw.strip()
        if s.startswith("("):
            return _parse_tuple(s)
        if re.fullmatch(r"-?\d+", s):
            return int(s)
        return s
    raise DesignError(f"cannot parse point {raw!r}")


def _parse_tuple(s: str):
    assert s[0] == "(" and s[-1] == ")"
    parts = []
    depth = 0
    token = ""
    for ch in s[1:-1]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(token)
            token = ""
        else:
            token += ch
    parts.append(token)
    return tuple(parse_point(t) for t in parts)


# ---------------------------------------------------------------------------
# designs and nestings


def design_to_json(d: Design, group: FiniteGroup | None = None,
                   nesting: Nesting | None = None, params: dict | None = None) -> dict:
    blocks = d.blocks
    if nesting is not None:
        blocks = tuple(blk + (p,) for blk, p in zip(nesting.base.blocks, nesting.phi))
    out = {
        "group": group.descriptor() if group is not None else "labels",
        "points": [render_point(p) for p in d.points],
        "blocks": [[render_point(p) for p in blk] for blk in blocks],
    }
    if isinstance(d, GroupDivisibleDesign):
        out["groups"] = [[render_point(p) for p in g] for g in d.groups]
    if params:
        out["params"] = params
    if nesting is not None:
        out["nested"] = True
    return out


def nesting_to_json(n: Nesting, group: FiniteGroup | None = None,
                    params: dict | None = None) -> dict:
    return design_to_json(n.base, group=group, nesting=n, params=params)


def design_from_json(data: dict) -> tuple[Design, Nesting | None, dict]:
    """Returns (design, nesting-or-None, params)."""
    points = [parse_point(p) for p in data["points"]]
    raw_blocks = [[parse_point(p) for p in blk] for blk in data["blocks"]]
    nested = bool(data.get("nested"))
    params = dict(data.get("params", {}))
    groups = data.get("groups")
    if nested:
        bases = [tuple(sorted(b[:-1], key=_pk)) for b in raw_blocks]
        phi = [b[-1] for b in raw_blocks]
        order = sorted(range(len(bases)), key=lambda i: tuple(_pk(p) for p in bases[i]) + (_pk(phi[i]),))
        bases = [bases[i] for i in order]
        phi = [phi[i] for i in order]
    else:
        bases = [tuple(sorted(b, key=_pk)) for b in raw_blocks]
        phi = None
    pts = tuple(sorted(points, key=_pk))
    if groups is not None:
        d: Design = GroupDivisibleDesign(
            pts, tuple(bases),
            tuple(tuple(sorted((parse_point(p) for p in g), key=_pk)) for g in groups))
    else:
        d = Design(pts, tuple(bases))
    nesting = Nesting(d, tuple(phi)) if phi is not None else None
    return d, nesting, params


def _pk(p):
    from .designs import point_key

    return point_key(p)


# ---------------------------------------------------------------------------
# families


def family_to_json(f: DifferenceFamily) -> dict:
    kind = {"brdf": "brdf", "weak": "weak", "rdf": "rdf", "perfect": "perfect"}[f.kind]
    return {
        "group": f.group.descriptor(),
        "subgroup": [render_point(p) for p in f.subgroup.sorted_elements()],
        "k": f.k,
        "lambda": f.lam,
        "kind": kind,
        "blocks": [[render_point(p) for p in blk] for blk in f.blocks],
    }


def family_from_json(data: dict) -> DifferenceFamily:
    g = make_group(data["group"])
    return family(
        g,
        [parse_point(p) for p in data["subgroup"]],
        [[parse_point(p) for p in blk] for blk in data["blocks"]],
        kind=data.get("kind", "brdf"),
        lam=data.get("lambda", 1),
    )


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: dict, path=None) -> str:
    text = json.dumps(data, indent=1, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text
