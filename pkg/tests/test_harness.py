"""Unit tests for the experiment runner, statistics, and I/O."""

from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from corrsurf import harness
from corrsurf.errors import ConfigError, InfeasibleDecodeError
from corrsurf.harness import RunRecord


def test_wilson_zero_failures():
    lo, hi = harness.wilson_ci(0, 100)
    assert lo == 0.0
    assert hi == pytest.approx(0.0370, abs=5e-4)


def test_wilson_symmetric_at_half():
    lo, hi = harness.wilson_ci(50, 100)
    assert lo + hi == pytest.approx(1.0, abs=1e-9)


def test_wilson_all_failures():
    lo, hi = harness.wilson_ci(100, 100)
    assert hi == pytest.approx(1.0, abs=1e-12)
    assert lo == pytest.approx(1 - 0.0370, abs=5e-4)


def test_wilson_validation():
    with pytest.raises(ConfigError):
        harness.wilson_ci(1, 0)
    with pytest.raises(ConfigError):
        harness.wilson_ci(5, 4)


def test_run_code_capacity_zero_p():
    record = harness.run_code_capacity("iid", 3, 0.0, 500, seed=1)
    assert record.failures == 0
    assert record.rounds == 0


def test_run_code_capacity_deterministic():
    a = harness.run_code_capacity("iid", 3, 0.08, 4000, seed=5)
    b = harness.run_code_capacity("iid", 3, 0.08, 4000, seed=5)
    assert a == b
    c = harness.run_code_capacity("iid", 3, 0.08, 4000, seed=6)
    assert c.failures != a.failures or c.seed != a.seed


def test_run_code_capacity_shard_additivity():
    # shards are seeded per (cell, shard); shot count only extends shards
    full = harness.run_code_capacity("iid", 3, 0.1, 20_000, seed=9)
    a = harness.run_code_capacity("iid", 3, 0.1, 10_000, seed=9)
    assert full.failures >= a.failures
    assert full.shots == 20_000


def test_run_rejects_bad_family():
    with pytest.raises(ConfigError):
        harness.run_code_capacity("bogus", 3, 0.1, 100, seed=0)
    with pytest.raises(ConfigError):
        harness.run_code_capacity("type1", 3, 0.1, 100, seed=0)  # no k


def test_run_rejects_half_probability():
    with pytest.raises(ConfigError):
        harness.run_code_capacity("iid", 3, 0.5, 100, seed=0)


def test_csv_roundtrip_and_header(tmp_path):
    records = [
        harness.run_code_capacity("iid", 3, 0.05, 1000, seed=3),
        harness.run_code_capacity("type1", 3, 0.05, 1000, seed=3, k=2),
    ]
    text = harness.records_to_csv(records)
    lines = text.strip().split("\n")
    assert lines[0] == harness.CSV_HEADER
    assert len(lines) == 3
    assert text == harness.records_to_csv(records)  # byte-identical


def _synthetic_records(slopes, ps, shots=100_000):
    """Records whose log-rate curves are straight lines in p."""
    out = []
    for d, (a, b) in slopes.items():
        for p in ps:
            rate = float(np.exp(a * p + b))
            failures = int(round(rate * shots))
            lo, hi = harness.wilson_ci(failures, shots)
            out.append(
                RunRecord("iid", None, d, 0, p, 0.0, shots, failures,
                          failures / shots, lo, hi, 0)
            )
    return out


def test_threshold_on_synthetic_crossing():
    # two lines crossing at p = 0.1
    ps = [0.08, 0.09, 0.10, 0.11, 0.12]
    records = _synthetic_records({5: (30.0, -6.0), 7: (50.0, -8.0)}, ps)
    est = harness.estimate_threshold(records, bootstrap=200, seed=1)
    assert est.p_th == pytest.approx(0.1, abs=0.004)
    assert est.ci_low <= est.p_th <= est.ci_high


def test_threshold_refuses_no_crossing():
    ps = [0.08, 0.09, 0.10, 0.11]
    records = _synthetic_records({5: (30.0, -4.0), 7: (30.0, -8.0)}, ps)
    with pytest.raises(InfeasibleDecodeError, match="crossing"):
        harness.estimate_threshold(records, bootstrap=50)


def test_threshold_needs_two_distances():
    ps = [0.08, 0.09, 0.10, 0.11]
    records = _synthetic_records({5: (30.0, -6.0)}, ps)
    with pytest.raises(ConfigError):
        harness.estimate_threshold(records)


def test_plot_svg():
    ps = [0.08, 0.09, 0.10, 0.11]
    records = _synthetic_records({5: (30.0, -6.0), 7: (50.0, -8.0)}, ps)
    svg = harness.plot_rates_svg(records, title="test")
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 2
    assert "d=5" in svg and "d=7" in svg


def test_cli_sample_and_threshold(tmp_path):
    cfg = {
        "experiment": "code-capacity",
        "family": "iid",
        "d": [3, 5],
        "p": [0.06, 0.08, 0.10, 0.12, 0.14],
        "shots": 3000,
        "seed": 11,
        "out": str(tmp_path / "runs.csv"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    proc = subprocess.run(
        [sys.executable, "-m", "corrsurf.cli", "sample", "--config",
         str(cfg_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    csv_text = (tmp_path / "runs.csv").read_text()
    assert csv_text.splitlines()[0] == harness.CSV_HEADER

    proc2 = subprocess.run(
        [sys.executable, "-m", "corrsurf.cli", "threshold", "--csv",
         str(tmp_path / "runs.csv")],
        capture_output=True,
        text=True,
    )
    assert proc2.returncode == 0, proc2.stderr
    out = json.loads(proc2.stdout)
    assert 0.06 <= out["p_th"] <= 0.14


def test_cli_config_error(tmp_path):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"experiment": "code-capacity"}))
    proc = subprocess.run(
        [sys.executable, "-m", "corrsurf.cli", "sample", "--config",
         str(cfg_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "missing" in proc.stderr


def test_cli_decode(code=None):
    proc = subprocess.run(
        [sys.executable, "-m", "corrsurf.cli", "decode", "--family", "iid",
         "--d", "3", "--p", "0.05", "--syndrome", "100000000000"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    out = json.loads(proc.stdout)
    assert out["correction_support"] == [0]


def test_run_circuit_level_noiseless():
    record = harness.run_circuit_level("none", 3, 0.0, 0.0, 200, seed=0)
    assert record.failures == 0
    assert record.rounds == 3


def test_run_circuit_level_smoke():
    record = harness.run_circuit_level(
        "type1-k2", 3, 0.01, 0.01, 2000, seed=4
    )
    assert 0 < record.failures < 2000
    assert record.ci_low <= record.logical_rate <= record.ci_high
    again = harness.run_circuit_level(
        "type1-k2", 3, 0.01, 0.01, 2000, seed=4
    )
    assert again == record
