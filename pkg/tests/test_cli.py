"""Tests for the command-line interface.

Commands are invoked in process through ``main(argv)``; outputs go to tmp
files or captured stdout.  The CSV/JSON contracts matter more than the
numbers here (the numerics are covered by the library tests): schemas,
byte stability, deterministic ordering under threading, config-file
precedence, and exit codes.
"""

import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from stable_anticipate.cli import main
from stable_anticipate.models import AR1, PathConfig
from stable_anticipate.moments import asymptotic_moments
from stable_anticipate.simulate import simulate_ar1

BUBBLE_FLAGS = ["--model", "ar1", "--alpha", "1.7", "--beta", "0.8",
             "--sigma", "0.1", "--rho", "0.95"]


def _run_to_file(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out


# ---------------------------------------------------------------------------
# simulate


def test_simulate_writes_the_path_as_csv(tmp_path):
    code, out = _run_to_file(tmp_path, "path.csv", [
        "simulate", *BUBBLE_FLAGS, "--n", "2000", "--seed", "7"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,x"
    assert len(lines) == 2001
    ts = [int(line.split(",")[0]) for line in lines[1:]]
    assert ts == list(range(2000))
    xs = np.array([float(line.split(",")[1]) for line in lines[1:]])
    assert np.isfinite(xs).all()


def test_simulate_is_byte_stable(tmp_path):
    argv = ["simulate", *BUBBLE_FLAGS, "--n", "300", "--seed", "5"]
    _, first = _run_to_file(tmp_path, "a.csv", argv)
    _, second = _run_to_file(tmp_path, "b.csv", argv)
    assert first.read_bytes() == second.read_bytes()
    _, third = _run_to_file(tmp_path, "c.csv", [
        "simulate", *BUBBLE_FLAGS, "--n", "300", "--seed", "6"])
    assert first.read_bytes() != third.read_bytes()


def test_simulate_round_trips_the_library_path(tmp_path):
    # 17 significant digits must reproduce the doubles exactly
    _, out = _run_to_file(tmp_path, "p.csv", [
        "simulate", *BUBBLE_FLAGS, "--n", "50", "--seed", "3"])
    xs = np.array([float(r["x"]) for r in csv.DictReader(out.open())])
    want = simulate_ar1(AR1(1.7, 0.8, 0.1, 0.95), PathConfig(50, seed=3))
    assert_array_equal(xs, want)


def test_simulate_time_column_scales_with_dt(tmp_path):
    _, out = _run_to_file(tmp_path, "ou.csv", [
        "simulate", "--model", "ou", "--alpha", "1.7", "--beta", "0.3",
        "--lam", "0.2", "--n", "4", "--seed", "2", "--dt", "0.5"])
    ts = [row["t"] for row in csv.DictReader(out.open())]
    assert ts == ["0", "0.5", "1", "1.5"]


def test_simulate_usage_errors_exit_2(capsys):
    for argv in (["simulate", "--model", "ar1", "--alpha", "1.7",
                  "--beta", "0.8", "--sigma", "0.1", "--n", "10"],
                 ["simulate", "--alpha", "1.7", "--n", "10"],
                 ["simulate", *BUBBLE_FLAGS, "--n", "0"],
                 ["simulate", *BUBBLE_FLAGS, "--n", "10", "--alpha", "2.3"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
        capsys.readouterr()


def test_config_file_fills_flags_and_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = ar1\nalpha = 1.7\nbeta = 0.8  # skew\n"
                   "sigma = 0.1\nrho = 0.95\nn = 40\nseed = 7\n")
    _, from_cfg = _run_to_file(tmp_path, "cfg.csv",
                               ["simulate", "--config", str(cfg)])
    _, from_flags = _run_to_file(tmp_path, "flags.csv", [
        "simulate", *BUBBLE_FLAGS, "--n", "40", "--seed", "7"])
    assert from_cfg.read_bytes() == from_flags.read_bytes()
    # explicit flag overrides the file value
    _, overridden = _run_to_file(tmp_path, "ovr.csv", [
        "simulate", "--config", str(cfg), "--seed", "8"])
    assert overridden.read_bytes() != from_cfg.read_bytes()


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("rho = 0.95\nspeed = 11\n")
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(cfg)])
    assert exc.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# surface


SURFACE_HEADER = "x,h,mean,mean_err,var,var_err,skew,skew_err,kurt_ex,kurt_err,regime"


def test_surface_schema_and_ordering(tmp_path):
    argv = ["surface", *BUBBLE_FLAGS, "--x-min", "-1", "--x-max", "1",
            "--x-count", "3", "--h-min", "1", "--h-max", "3"]
    _, out = _run_to_file(tmp_path, "surf.csv", argv)
    lines = out.read_text().splitlines()
    assert lines[0] == SURFACE_HEADER
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 9
    keys = [(float(r["x"]), int(r["h"])) for r in rows]
    assert keys == sorted(keys)
    for row in rows:
        assert row["regime"] == "exact"
        for field in ("mean", "var", "skew", "kurt_ex"):
            assert np.isfinite(float(row[field]))


def test_surface_is_deterministic_across_thread_counts(tmp_path, monkeypatch):
    argv = ["surface", *BUBBLE_FLAGS, "--x-min", "-2", "--x-max", "2",
            "--x-count", "4", "--h-min", "1", "--h-max", "4"]
    monkeypatch.setenv("STABLE_ANTICIPATE_THREADS", "1")
    _, serial = _run_to_file(tmp_path, "serial.csv", argv)
    monkeypatch.setenv("STABLE_ANTICIPATE_THREADS", "4")
    _, pooled = _run_to_file(tmp_path, "pooled.csv", argv)
    assert serial.read_bytes() == pooled.read_bytes()


def test_surface_leaves_nonexistent_moments_empty(tmp_path):
    # alpha = 0.9 keeps orders 1..2 but loses skewness and kurtosis
    _, out = _run_to_file(tmp_path, "gate.csv", [
        "surface", "--model", "ar1", "--alpha", "0.9", "--beta", "0",
        "--sigma", "1", "--rho", "0.5", "--x-min", "-1", "--x-max", "1",
        "--x-count", "3", "--h-min", "1", "--h-max", "1"])
    for row in csv.DictReader(out.open()):
        assert row["skew"] == "" and row["skew_err"] == ""
        assert row["kurt_ex"] == "" and row["kurt_err"] == ""
        assert np.isfinite(float(row["mean"]))
        assert row["regime"] == "exact"


def test_surface_ou_horizons_are_real(tmp_path):
    _, out = _run_to_file(tmp_path, "ou.csv", [
        "surface", "--model", "ou", "--alpha", "1.7", "--beta", "0.3",
        "--lam", "0.2", "--x-min", "0", "--x-max", "1", "--x-count", "2",
        "--h-min", "0.5", "--h-max", "2", "--h-count", "4"])
    hs = sorted({row["h"] for row in csv.DictReader(out.open())})
    assert hs == ["0.5", "1", "1.5", "2"]


# ---------------------------------------------------------------------------
# asymptotics


def test_asymptotics_reports_the_limit_set(tmp_path):
    code, out = _run_to_file(tmp_path, "asym.json", [
        "asymptotics", *BUBBLE_FLAGS, "--h", "1"])
    assert code == 0
    text = out.read_text()
    payload = json.loads(text)
    assert list(payload) == sorted(payload)
    assert payload["survival_prob"] == pytest.approx(0.95 ** 1.7, rel=1e-15)
    assert payload["explosion_level"] == pytest.approx(1.0 / 0.95, rel=1e-15)
    limits = asymptotic_moments(AR1(1.7, 0.8, 0.1, 0.95), 1, +1)
    assert payload["gamma1_limit"] == pytest.approx(limits[2].value, rel=1e-15)
    assert payload["gamma2_limit"] == pytest.approx(limits[3].value, rel=1e-15)
    # 17 significant digits, round-trip exact
    assert "0.91649506121801261" in text


def test_asymptotics_emits_null_for_missing_orders(tmp_path):
    _, out = _run_to_file(tmp_path, "a12.json", [
        "asymptotics", "--model", "ar1", "--alpha", "1.2", "--beta", "0",
        "--sigma", "1", "--rho", "0.5", "--h", "1"])
    payload = json.loads(out.read_text())
    assert payload["gamma2_limit"] is None
    assert np.isfinite(payload["gamma1_limit"])


def test_asymptotics_rejects_negative_rho(capsys):
    code = main(["asymptotics", "--model", "ar1", "--alpha", "1.7",
                 "--beta", "0.8", "--sigma", "0.1", "--rho", "-0.6",
                 "--h", "1"])
    assert code == 2
    payload = json.loads(capsys.readouterr().out)
    assert payload["code"] == "asymptotics-unsupported"
    assert "rho" in payload["message"]


# ---------------------------------------------------------------------------
# validate


def test_validate_quadrature_suite_passes(tmp_path):
    code, out = _run_to_file(tmp_path, "quad.json", [
        "validate", "--suite", "quadrature"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["suite"] == "quadrature"
    assert report["passed"] is True
    assert all(c["passed"] for c in report["checks"])
    for check in report["checks"]:
        assert check["deviation"] <= check["tolerance"]


def test_validate_constants_suite_passes(tmp_path):
    code, out = _run_to_file(tmp_path, "cons.json", [
        "validate", "--suite", "constants"])
    assert code == 0
    report = json.loads(out.read_text())
    assert {c["name"] for c in report["checks"]} == {
        "constants-ar1-grid", "constants-ou-grid", "constants-aggregated-grid"}


def test_validate_reports_insufficient_data_and_exits_1(tmp_path):
    code, out = _run_to_file(tmp_path, "orc.json", [
        "validate", "--suite", "oracles", "--n-paths", "2000"])
    assert code == 1
    report = json.loads(out.read_text())
    assert report["passed"] is False
    failed = [c for c in report["checks"] if not c["passed"]]
    assert failed
    assert any("pairs hit the conditioning bin" in c.get("detail", "")
               for c in failed)


def test_validate_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--suite", "nosuch"])
    assert exc.value.code == 2
    capsys.readouterr()
