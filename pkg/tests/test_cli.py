import csv
import json

import numpy as np
import pytest

from trdevdiv import Layout, ScalarField, build_grid
from trdevdiv.cli import main
from trdevdiv.io import save_field


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def _run(tmp_path, *args, out="out"):
    target = tmp_path / out
    return main([*args, "--out", str(target)]), target


def test_norms_constant_field(tmp_path):
    grid = build_grid(2, 8)
    save_field(ScalarField(grid, Layout.FULL, np.ones(grid.shape(Layout.FULL))), tmp_path / "one.json")
    code, out = _run(tmp_path, "norms", "--field", str(tmp_path / "one.json"), "--s", "0", "--s", "0.5", "--s", "1")
    assert code == 0
    rows = _rows(out / "norms.csv")
    assert [float(r["hs"]) for r in rows] == [1.0, 1.0, 1.0]


def test_norms_duplicate_orders_collapse(tmp_path):
    code, out = _run(tmp_path, "norms", "--s", "0.5", "--s", "0.5", "--s", "0", "--n-random", "1")
    assert code == 0
    assert [float(r["s"]) for r in _rows(out / "norms.csv")] == [0.0, 0.5]


def test_out_directory_created(tmp_path):
    code, out = _run(tmp_path, "norms", "--n-random", "1", out="a/b/c")
    assert code == 0 and (out / "norms.json").exists()


@pytest.mark.parametrize("cmd", ["norms", "infsup", "ctdd", "elasticity"])
def test_commands_deterministic(tmp_path, cmd):
    args = [cmd, "--resolution", "6", "--s", "0.5", "--lambda", "1", "--lambda", "100"]
    c1, o1 = _run(tmp_path, *args, out="r1")
    c2, o2 = _run(tmp_path, *args, out="r2")
    assert c1 == c2 == 0
    files = sorted(p.name for p in o1.iterdir())
    assert files == sorted(p.name for p in o2.iterdir()) and files
    for name in files:
        assert (o1 / name).read_bytes() == (o2 / name).read_bytes(), name


def test_meta_records_config(tmp_path):
    code, out = _run(tmp_path, "infsup", "--resolution", "6", "--seed", "7")
    data = json.loads((out / "infsup.json").read_text())
    assert code == 0
    assert data["meta"]["seed"] == 7 and data["meta"]["experiment"] == "infsup"
    assert len(data["meta"]["config_digest"]) == 64


def test_ctdd_identity_subspace_reports_error(tmp_path):
    code, out = _run(tmp_path, "ctdd", "--resolution", "6", "--s", "0.5", "--subspace", "identity")
    assert code == 1
    (row,) = _rows(out / "ctdd.csv")
    assert "identity not excluded" in row["error"] and row["c_hat"] == "nan"


def test_ctdd_near_identity_rows(tmp_path):
    code, out = _run(tmp_path, "ctdd", "--resolution", "6", "--s", "0.5", "--subspace", "near_identity",
                     "--near-id-t", "0", "--near-id-t", "0.9")
    rows = _rows(out / "ctdd.csv")
    assert code == 0 and len(rows) == 2
    assert float(rows[0]["c_hat"]) > float(rows[1]["c_hat"]) > 0


def test_elasticity_zero_load(tmp_path):
    code, out = _run(tmp_path, "elasticity", "--resolution", "6", "--load", "zero", "--s", "1")
    assert code == 0
    assert all(float(r["value"]) == 0.0 for r in _rows(out / "elasticity.csv"))


@pytest.mark.parametrize(
    "args",
    [
        ["elasticity", "--mu", "0"],
        ["elasticity", "--lambda", "-1"],
        ["norms", "--s", "2"],
        ["norms", "--resolution", "1"],
        ["norms", "--field", "does-not-exist.json"],
        ["bogus"],
        ["ctdd", "--subspace", "nope"],
    ],
)
def test_config_errors_exit_2(tmp_path, args):
    code, _ = _run(tmp_path, *args)
    assert code == 2


def test_malformed_field_exit_2(tmp_path):
    (tmp_path / "bad.json").write_text('{"format": "trdevdiv-field"}')
    code, _ = _run(tmp_path, "norms", "--field", str(tmp_path / "bad.json"))
    assert code == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"resolution": [6], "s": [0.25], "seed": 3, "n_random": 1}))
    code, out = _run(tmp_path, "norms", "--config", str(cfg), "--seed", "4")
    data = json.loads((out / "norms.json").read_text())
    assert code == 0
    assert data["meta"]["seed"] == 4
    assert {r["s"] for r in data["rows"]} == {0.25}


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"resolutoin": [6]}))
    code, _ = _run(tmp_path, "norms", "--config", str(cfg))
    assert code == 2


def test_verify_passes(tmp_path):
    code, out = _run(tmp_path, "verify")
    data = json.loads((out / "verify.json").read_text())
    assert code == 0
    assert len(data["results"]) == 11 and all(c["passed"] for c in data["results"])
