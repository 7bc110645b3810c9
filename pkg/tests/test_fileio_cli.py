"""File formats round-trip and the command-line surface."""

from __future__ import annotations

import json

import pytest

from nestkit.catalog import load_family, materialize
from nestkit.cli import main
from nestkit.fileio import (
    design_from_json,
    dump_json,
    family_from_json,
    family_to_json,
    nesting_to_json,
    parse_point,
    render_point,
)


def test_point_rendering_roundtrip():
    for p in [7, "inf0", (1, 0, 7), ((3, 0), 1), ("inf1", 2), (2, 1)]:
        assert parse_point(render_point(p)) == p


def test_family_roundtrip():
    f = load_family("weak-v40")
    data = family_to_json(f)
    assert data["subgroup"] == [0, 10, 20, 30]
    f2 = family_from_json(data)
    assert f2.blocks == f.blocks and f2.kind == f.kind


def test_family_roundtrip_product_group():
    f = load_family("brdf-4x13")
    f2 = family_from_json(family_to_json(f))
    assert f2.blocks == f.blocks
    assert f2.group.descriptor() == "Z2xZ2xGF(13)"


def test_nesting_file_roundtrip(tmp_path):
    m = materialize("nested-16")
    data = nesting_to_json(m.nesting, params={"v": 16, "k": 4, "lambda": 1})
    path = tmp_path / "n16.json"
    dump_json(data, path)
    d, nesting, params = design_from_json(json.loads(path.read_text()))
    assert nesting is not None and params["v"] == 16
    assert sorted(nesting.phi) == sorted(m.nesting.phi)


def test_cli_catalog_verify_and_filters(capsys):
    assert main(["catalog", "verify", "--id", "table1-v61"]) == 0
    out = capsys.readouterr().out
    assert "PASS table1-v61" in out
    assert main(["catalog", "verify", "--kind", "16-tuple"]) == 0
    out = capsys.readouterr().out
    assert "12 entries, 0 failures" in out


def test_cli_verify_design(tmp_path, capsys):
    m = materialize("nested-16")
    base_only = nesting_to_json(m.nesting, params={"v": 16, "k": 4, "lambda": 1})
    path = tmp_path / "n16.json"
    dump_json(base_only, path)
    assert main(["verify-nesting", "--file", str(path)]) == 0

    # breaking a block must surface as exit code 1
    data = json.loads(path.read_text())
    data["blocks"][0] = [1, 2, 3, 4, 5]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["verify-nesting", "--file", str(bad)]) == 1


def test_cli_design_verify_partial_and_gdd(tmp_path, capsys):
    from nestkit.fileio import design_to_json
    from nestkit.families import brdf_to_nested_gdd

    f = load_family("brdf-z15")
    d, nesting = brdf_to_nested_gdd(f)
    path = tmp_path / "g15.json"
    dump_json(design_to_json(d, group=f.group, params={"k": 4, "lambda": 1}), path)
    assert main(["verify", "--file", str(path), "--gdd"]) == 0

    aug = nesting_to_json(nesting, group=f.group, params={"k": 5, "lambda": 2})
    aug.pop("nested")
    aug["blocks"] = [list(b) + [p] for b, p in zip(d.blocks, nesting.phi)]
    path2 = tmp_path / "aug15.json"
    dump_json(aug, path2)
    assert main(["verify", "--file", str(path2), "--gdd", "--partial"]) == 0
    assert main(["verify", "--file", str(path2), "--gdd"]) == 1  # not a full GDD


def test_cli_construct_and_brdf(tmp_path, capsys):
    out_file = tmp_path / "f.json"
    assert main(["construct", "theorem3", "--v", "9", "--output", str(out_file)]) == 0
    assert main(["brdf", "verify", "--file", str(out_file)]) == 0
    assert main(["brdf", "to-design", "--file", str(out_file),
                 "--output", str(tmp_path / "n.json")]) == 0
    assert main(["verify-nesting", "--file", str(tmp_path / "n.json")]) == 0

    assert main(["construct", "theorem3", "--v", "21"]) == 2  # rejected


def test_cli_brdf_suitable_x(tmp_path, capsys):
    path = tmp_path / "w40.json"
    dump_json(family_to_json(load_family("weak-v40")), path)
    assert main(["brdf", "suitable-x", "--file", str(path)]) == 0
    assert "3" in capsys.readouterr().out
    assert main(["brdf", "to-design", "--file", str(path), "--x", "3",
                 "--output", str(tmp_path / "n40.json")]) == 0
    assert main(["verify-nesting", "--file", str(tmp_path / "n40.json")]) == 0


def test_cli_search_and_exit_codes(capsys):
    assert main(["search", "brdf", "--group", "Z13", "--subgroup", "0"]) == 0
    assert main(["search", "brdf", "--group", "Z16", "--subgroup", "0,4,8,12"]) == 3
    assert main(["search", "tuple16", "--q", "13", "--budget", "0"]) == 3
    assert main(["search", "nesting", "--v", "13", "--blocks", "1,2,4,10"]) == 0
    assert main(["search", "brdf", "--group", "Z14", "--subgroup", "0"]) == 2


def test_cli_compose_and_plan(tmp_path, capsys):
    assert main(["compose", "hdm", "--q", "7", "--k", "4"]) == 0
    assert main(["compose", "tdtrunc", "--m", "8", "--t", "5"]) == 0
    capsys.readouterr()
    assert main(["plan", "--v", "61", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["kind"] == "catalog"
    assert main(["plan", "--v", "568"]) == 3  # external ingredients
    assert main(["spectrum", "--v", "10"]) == 0
    assert "IMPOSSIBLE" in capsys.readouterr().out


def test_cli_plan_execute(tmp_path):
    out = tmp_path / "d61.json"
    assert main(["plan", "--v", "61", "--execute", "--output", str(out)]) == 0
    assert main(["verify-nesting", "--file", str(out)]) in (0, 2)  # wrapped payload


def test_cli_registry_roundtrip(tmp_path, capsys):
    from nestkit.fileio import design_to_json

    m = materialize("nested-16")
    src = tmp_path / "n16.json"
    dump_json(nesting_to_json(m.nesting, params={"v": 16}), src)
    regdir = tmp_path / "registry"
    assert main(["registry", "add", str(src), "--role", "nested-bibd",
                 "--param", "16", "--registry-dir", str(regdir)]) == 0
    assert main(["registry", "list", "--registry-dir", str(regdir)]) == 0
    assert "nested-bibd" in capsys.readouterr().out
    assert main(["plan", "--v", "61", "--registry-dir", str(regdir)]) == 0


def test_cli_invalid_inputs(capsys):
    assert main(["verify", "--file", "/nonexistent.json"]) == 2
    assert main(["construct", "theorem3"]) == 2
    assert main(["catalog", "verify", "--id", "nope"]) == 2
