import json

import pytest

from curvedwalk.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_coin_tiled(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, stdout, _ = _run(capsys, "build-coin", "--scheme", "tiled", "--k", "5", "--r", "2", "--out", str(out))
    assert code == 0
    assert json.loads(stdout)["realized_speed"] == 0.25
    code, stdout, _ = _run(capsys, "speeds", "--coin", str(out))
    assert code == 0 and any(abs(c - 0.25) < 1e-8 for c in json.loads(stdout)["speeds"])
    code, stdout, _ = _run(capsys, "check-coin", "--coin", str(out))
    assert code == 0 and all(r["residual"] <= 1e-10 for r in json.loads(stdout)["residuals"])


def test_build_coin_fixed(tmp_path, capsys):
    out = tmp_path / "f.json"
    code, stdout, _ = _run(capsys, "build-coin", "--scheme", "fixed", "--k", "2", "--c", "0", "--out", str(out))
    assert code == 0
    assert all(r["residual"] <= 1e-10 for r in json.loads(stdout)["residuals"])


def test_usage_errors(tmp_path, capsys):
    out = str(tmp_path / "x.json")
    assert _run(capsys, "build-coin", "--scheme", "tiled", "--k", "0", "--r", "0", "--out", out)[0] == 2
    code, _, err = _run(capsys, "build-coin", "--scheme", "tiled", "--k", "3", "--out", out)
    assert code == 2 and json.loads(err)["error"] == "usage"


def test_infeasible_exit_code(tmp_path, capsys):
    out = str(tmp_path / "x.json")
    code, _, err = _run(capsys, "build-coin", "--scheme", "fixed", "--k", "2", "--c", "0.3",
                        "--im-f", "5", "--out", out)
    assert code == 3 and json.loads(err)["error"] == "infeasible"


def test_identity_coin_speeds(tmp_path, capsys):
    p = tmp_path / "id.json"
    p.write_text(json.dumps({"k": 1, "C": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}))
    code, stdout, _ = _run(capsys, "speeds", "--coin", str(p))
    assert code == 0 and json.loads(stdout)["speeds"] == [-1.0, 1.0]


def test_parse_errors(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"k": 1, "C": [[')
    assert _run(capsys, "check-coin", "--coin", str(p))[0] == 2
    assert _run(capsys, "simulate", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path))[0] == 2


def _config(tmp_path, **kw):
    d = {"k": 5, "n_cells": 256, "steps": 100, "eps": 0.5, "scheme": "tiled", "snapshot_every": 1,
         "metric": {"kind": "constant", "c0": 0.25}, "initial": {"x0": 180.0, "sigma": 12.0}}
    d.update(kw)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(d))
    return p


def test_simulate_is_deterministic(tmp_path, capsys):
    cfg = _config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    code, stdout, _ = _run(capsys, "simulate", "--config", str(cfg), "--out", str(a))
    assert code == 0
    assert abs(json.loads(stdout)["fitted_velocity"] - 0.25) <= 0.005
    assert _run(capsys, "simulate", "--config", str(cfg), "--out", str(b))[0] == 0
    for name in ("trajectory.csv", "metadata.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_configuration_error(tmp_path, capsys):
    cfg = _config(tmp_path, metric={"kind": "static", "c0": 0.2, "dc": 0.1})
    code, _, err = _run(capsys, "simulate", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 3 and json.loads(err)["error"] == "configuration"


def test_converge(tmp_path, capsys):
    p = tmp_path / "conv.json"
    p.write_text(json.dumps({"k": 5, "scheme": "tiled", "metric": {"kind": "constant", "c0": 0.25},
                             "length": 8.0, "horizon": 2.0, "initial": {"x0": 4.0, "sigma": 0.5}}))
    code, stdout, _ = _run(capsys, "converge", "--config", str(p), "--eps", "1/64,1/128,1/256",
                           "--out", str(tmp_path / "c"))
    assert code == 0 and json.loads(stdout)["slope"] >= 0.8
    assert (tmp_path / "c" / "convergence.json").exists()


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "curvedwalk", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "build-coin" in r.stdout
