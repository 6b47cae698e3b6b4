"""Tests for the plotting command line interface."""

import subprocess
import sys

import matplotlib

matplotlib.use("Agg")

import pytest

from stable_anticipate_plots.cli import main

from .test_figures import PNG_MAGIC, _path_csv, _surface_csv, _write


def test_path_command_writes_the_image(tmp_path):
    out = tmp_path / "fig.png"
    rc = main(["path", _path_csv(tmp_path), str(out)])
    assert rc == 0
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_title_flag_changes_the_output(tmp_path):
    csv_path = _path_csv(tmp_path)
    main(["path", csv_path, str(tmp_path / "a.png")])
    main(["path", csv_path, str(tmp_path / "b.png"), "--title", "bubble"])
    assert (tmp_path / "a.png").read_bytes() != \
           (tmp_path / "b.png").read_bytes()


def test_missing_input_exits_one(tmp_path, capsys):
    rc = main(["path", str(tmp_path / "nope.csv"), str(tmp_path / "f.png")])
    assert rc == 1
    assert "cannot read" in capsys.readouterr().err


def test_empty_csv_exits_one(tmp_path, capsys):
    empty = _write(tmp_path / "empty.csv", "")
    rc = main(["path", empty, str(tmp_path / "f.png")])
    assert rc == 1
    assert "is empty" in capsys.readouterr().err


def test_schema_mismatch_exits_one(tmp_path, capsys):
    bad = _write(tmp_path / "bad.csv", "a,b\n1,2\n")
    assert main(["path", bad, str(tmp_path / "f.png")]) == 1
    assert main(["surface", bad, str(tmp_path / "f.png")]) == 1
    assert "expected columns" in capsys.readouterr().err


def test_bad_extension_exits_one(tmp_path, capsys):
    rc = main(["path", _path_csv(tmp_path), str(tmp_path / "fig.gif")])
    assert rc == 1
    assert "unsupported image format" in capsys.readouterr().err


def test_usage_errors_exit_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["path", _path_csv(tmp_path)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["volume", "a.csv", "b.png"])
    assert exc.value.code == 2


def test_surface_command_writes_the_image(tmp_path):
    out = tmp_path / "fig.png"
    rc = main(["surface", _surface_csv(tmp_path), str(out),
               "--title", "moments"])
    assert rc == 0
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_surface_command_warns_without_kurt(tmp_path):
    csv_path = _surface_csv(tmp_path, no_kurt=True)
    with pytest.warns(UserWarning, match="no kurtosis columns"):
        rc = main(["surface", csv_path, str(tmp_path / "fig.png")])
    assert rc == 0


# integration with the numerics CLI, skipped when it is not installed

def _numerics_cli(tmp_path, *args):
    pytest.importorskip("stable_anticipate")
    proc = subprocess.run(
        [sys.executable, "-m", "stable_anticipate.cli"] + list(args),
        cwd=tmp_path, capture_output=True, text=True, check=True)
    return proc


def test_renders_a_simulated_path_end_to_end(tmp_path):
    _numerics_cli(tmp_path, "simulate", "--model", "ar1", "--alpha", "1.7",
                  "--beta", "0.8", "--sigma", "0.1", "--rho", "0.95",
                  "--n", "2000", "--seed", "7", "--out", "path.csv")
    rc = main(["path", str(tmp_path / "path.csv"),
               str(tmp_path / "path.png"), "--title", "simulated path"])
    assert rc == 0
    assert (tmp_path / "path.png").read_bytes()[:8] == PNG_MAGIC


def test_renders_a_moment_surface_end_to_end(tmp_path):
    _numerics_cli(tmp_path, "surface", "--model", "ar1", "--alpha", "1.7",
                  "--beta", "0.8", "--sigma", "0.1", "--rho", "0.95",
                  "--x-min", "-10", "--x-max", "10", "--x-count", "21",
                  "--h-min", "1", "--h-max", "5", "--h-count", "5",
                  "--out", "surface.csv")
    for name in ("one.png", "two.png"):
        rc = main(["surface", str(tmp_path / "surface.csv"),
                   str(tmp_path / name)])
        assert rc == 0
    assert (tmp_path / "one.png").read_bytes() == \
           (tmp_path / "two.png").read_bytes()
