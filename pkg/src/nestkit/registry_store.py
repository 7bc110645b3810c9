"""Persisted ingredient registry: a directory of verified design files plus
a manifest.  Files are verified on add and re-verified on load, so a stale
or edited file can never flow into a composition unchecked."""

from __future__ import annotations

import json
import shutil
from pathlib import Path

from .designs import DesignError


def _manifest_path(root: str | Path) -> Path:
    return Path(root) / "manifest.json"


def _read_manifest(root: str | Path) -> list[dict]:
    path = _manifest_path(root)
    if not path.exists():
        return []
    return json.loads(path.read_text())


def _ingredient_from_file(path: Path, role: str):
    from .fileio import design_from_json, family_from_json, load_json

    data = load_json(path)
    if role == "brdf":
        return family_from_json(data)
    d, nesting, params = design_from_json(data)
    if role in ("nested-bibd", "nested-gdd-3"):
        if nesting is None:
            raise DesignError(f"{path} is not a nesting file")
        return nesting
    if role == "pbd":
        return d
    if role == "td":
        return d
    if role == "rbibd":
        classes = data.get("classes")
        if classes is None:
            raise DesignError("a resolvable design file needs a \"classes\" field")
        from .fileio import parse_point

        parsed = [[tuple(sorted((parse_point(p) for p in blk), key=_pk)) for blk in cls]
                  for cls in classes]
        return d, parsed
    raise DesignError(f"unknown role {role!r}")


def _pk(p):
    from .designs import point_key

    return point_key(p)


def add_to_store(root: str | Path, file: str | Path, role: str, param) -> dict:
    """Verify the ingredient, copy the file in and extend the manifest."""
    from .compose import IngredientRegistry

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    src = Path(file)
    obj = _ingredient_from_file(src, role)
    probe = IngredientRegistry(builtins=False)
    probe.add(role, param, obj)  # raises if the verifier rejects it
    dest = root / src.name
    if src.resolve() != dest.resolve():
        shutil.copy(src, dest)
    manifest = _read_manifest(root)
    entry = {"role": role, "param": list(param) if isinstance(param, tuple) else param,
             "file": src.name}
    manifest = [e for e in manifest if not (e["role"] == role and e["param"] == entry["param"])]
    manifest.append(entry)
    _manifest_path(root).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return entry


def list_store(root: str | Path) -> list[dict]:
    return _read_manifest(root)


def load_store(root: str | Path, registry) -> None:
    """Re-verify and install every manifest entry into the registry."""
    root = Path(root)
    for entry in _read_manifest(root):
        param = tuple(entry["param"]) if isinstance(entry["param"], list) else entry["param"]
        obj = _ingredient_from_file(root / entry["file"], entry["role"])
        registry.add(entry["role"], param, obj)
