import json

import numpy as np
import pytest

from fraccontrol.cli import main, parse_y0, read_control


def test_constants_command(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["constants", "--alpha", "1.5,2", "--s", "0.75", "--no-products",
                 "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert all(r["passed"] for r in rows)


def test_verify_biorthogonal_command(tmp_path, capsys):
    out = tmp_path / "k.csv"
    assert main(["verify-biorthogonal", "--n-max", "5", "--g0", "0.6", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,k1") and len(lines) == 6
    summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert summary["max_error"] <= 1e-6


def test_synthesize_then_simulate(tmp_path, capsys):
    stem = tmp_path / "ctl"
    assert main(["synthesize", "--s", "0.75", "--T", "0.3", "--method", "gramian", "--N", "4",
                 "--grid-size", "4097", "--out", str(stem)]) == 0
    manifest = json.loads((tmp_path / "ctl.json").read_text())
    assert manifest["N"] == 4 and manifest["samples"] == 4097
    u = read_control(str(tmp_path / "ctl.csv"))
    assert u.T == pytest.approx(0.3) and u.samples.size == 4097
    rep = tmp_path / "rep.json"
    assert main(["simulate", "--control", str(tmp_path / "ctl.csv"), "--s", "0.75",
                 "--T", "0.3", "--n-modes", "4", "--out", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["residual_rel"] < 1e-4


def test_simulate_rejects_horizon_mismatch(tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("t,re_u,im_u\n0,0,0\n0.1,0,0\n0.2,0,0\n")
    with pytest.raises(SystemExit):
        main(["simulate", "--control", str(p), "--s", "0.75", "--T", "0.3"])


def test_y0_parsing(tmp_path):
    assert parse_y0("modal:3").coeffs[2] == 1
    f = tmp_path / "y.json"
    f.write_text(json.dumps({"re": [1, 2], "im": [0, 1]}))
    assert np.allclose(parse_y0(str(f)).coeffs, [1, 2 + 1j])


def test_cost_sweep_command(tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"T_list": [0.6, 0.5, 0.4, 0.3], "N_policy": "fixed",
                               "N_fixed": 10}))
    res = tmp_path / "res.json"
    assert main(["cost-sweep", "--config", str(cfg), "--json", str(res)]) == 0
    data = json.loads(res.read_text())
    assert data["config"]["N_fixed"] == 10 and len(data["rows"]) == 4
