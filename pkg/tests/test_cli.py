import json
import subprocess
import sys

import numpy as np
import pytest

from eewf import cli
from eewf import solver
from eewf.channel import ChannelMatrix, write_matrices


@pytest.fixture
def matrices(tmp_path):
    path = tmp_path / "h.jsonl"
    write_matrices(path, [ChannelMatrix(2, np.eye(2, dtype=complex)), ChannelMatrix(2, np.ones((2, 2), dtype=complex))])
    return path


def test_static_reproduces_closed_forms(matrices, tmp_path, capsys):
    out = tmp_path / "static.json"
    assert cli.main(["static", str(matrices), "--out", str(out)]) == 0
    iso, r1 = json.loads(out.read_text())
    np.testing.assert_allclose(iso["eewf"]["p"], [0.25, 0.25], rtol=1e-10)
    assert iso["eewf"]["eta"] == pytest.approx(2 * np.log2(1.5) / 0.5, rel=1e-10)
    assert r1["eewf"]["eta"] == pytest.approx(4.0, rel=1e-12)
    assert r1["eewf"]["ptx"] == pytest.approx(0.25, rel=1e-12)
    assert "EEWF" in capsys.readouterr().out


def test_static_malformed_json(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("[[1, 0], [0,\n")
    assert cli.main(["static", str(bad)]) == 2


def test_static_missing_file(tmp_path):
    assert cli.main(["static", str(tmp_path / "nope.jsonl")]) == 2


def test_unknown_config_key_is_named(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"trials": 10, "trails": 10}))
    assert cli.main(["sweep", "--config", str(cfg)]) == 2
    assert "trails" in capsys.readouterr().err


def test_invalid_config_value(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sigma2": -1}))
    assert cli.main(["verify", "--config", str(cfg)]) == 2


def test_bad_argument_exit_code():
    assert cli.main(["sweep", "--trials", "many"]) == 2


def test_verify_passes_on_fresh_build(capsys):
    assert cli.main(["verify", "--instances", "40"]) == 0
    out = capsys.readouterr().out
    assert "kkt_residual" in out and "FAIL" not in out


def test_verify_catches_clamp_sign_error(monkeypatch, capsys):
    monkeypatch.setattr(solver, "_positive_part", np.abs)
    assert cli.main(["verify", "--instances", "40"]) == 1
    cap = capsys.readouterr()
    assert "FAIL kkt_residual" in cap.out
    assert "replay kkt_residual" in cap.err


def test_verify_rejects_oracle_dimension_five():
    assert cli.main(["verify", "--oracle-dim", "5", "--instances", "4"]) == 2


def test_sweep_writes_csv_and_meta(tmp_path):
    out = tmp_path / "s.csv"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"antenna_counts": [1, 2], "snr_grid_db": [0, 10], "pilot_trials": 50}))
    assert cli.main(["sweep", "--config", str(cfg), "--trials", "300", "--out", str(out), "--quiet"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 * 2 * 2
    meta = json.loads((tmp_path / "s.csv.meta.json").read_text())
    assert meta["seed"] == 2012 and meta["trials"] == 300
    assert len(meta["calibrated_sigma2"]) == 8


def test_sweep_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"antenna_counts": [2, 4], "snr_grid_db": [5], "pilot_trials": 50}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["sweep", "--config", str(cfg), "--trials", "1200", "--seed", "99", "--out", str(path), "--quiet"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_unwritable_output(tmp_path):
    assert cli.main(["sweep", "--trials", "10", "--out", str(tmp_path / "missing" / "s.csv")]) == 2


def test_closed_form_table(tmp_path, capsys):
    out = tmp_path / "cf.csv"
    assert cli.main(["closed-form", "--n", "1", "2", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "family,n,p,eta,rate,ptx"
    assert "Rank1,2,0.25,4,1,0.25" in rows


def test_bounds_inside(capsys):
    assert cli.main(["bounds", "--trials", "3000"]) == 0
    assert "NO" not in capsys.readouterr().out


def test_console_entry_point(matrices):
    res = subprocess.run([sys.executable, "-m", "eewf.cli", "static", str(matrices), "--quiet"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == ""
