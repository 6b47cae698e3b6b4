"""Tests for CSV loading and figure rendering."""

import struct

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stable_anticipate_plots import (PlotInputError, load_path_csv,
                                     load_surface_csv, plot_path,
                                     plot_surface, surface_panels)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def _path_csv(tmp_path, n=50):
    lines = ["t,x"] + [f"{i},{np.sin(0.3 * i):.6f}" for i in range(n)]
    return _write(tmp_path / "path.csv", "\n".join(lines) + "\n")


def _surface_csv(tmp_path, xs=(-2.0, 0.0, 2.0), hs=(1.0, 2.0),
                 missing=(), empty_fields=(), no_kurt=False,
                 name="surface.csv"):
    # mean = 0.9x, var = x^2 + h, skew = 0.1x, kurt_ex = h; combos in
    # `missing` get no row at all, combos in `empty_fields` get a row
    # with every moment blank and regime "undefined".
    header = ("x,h,mean,mean_err,var,var_err,skew,skew_err,regime"
              if no_kurt else
              "x,h,mean,mean_err,var,var_err,skew,skew_err,"
              "kurt_ex,kurt_err,regime")
    lines = [header]
    for x in xs:
        for h in hs:
            if (x, h) in missing:
                continue
            if (x, h) in empty_fields:
                moments = [""] * (6 if no_kurt else 8)
                regime = "undefined"
            else:
                vals = [0.9 * x, x * x + h, 0.1 * x] + \
                       ([] if no_kurt else [h])
                moments = []
                for v in vals:
                    moments += [repr(v), "1e-12"]
                regime = "exact"
            lines.append(",".join([repr(x), repr(h)] + moments + [regime]))
    return _write(tmp_path / name, "\n".join(lines) + "\n")


def _png_size(path):
    with open(path, "rb") as fh:
        data = fh.read(24)
    assert data[:8] == PNG_MAGIC
    return struct.unpack(">II", data[16:24])


# path CSVs

def test_load_path_csv_reads_t_and_x(tmp_path):
    csv_path = _path_csv(tmp_path, n=20)
    t, x = load_path_csv(csv_path)
    assert_allclose(t, np.arange(20.0))
    assert_allclose(x, np.sin(0.3 * np.arange(20)), atol=1e-6)


def test_load_path_csv_rejects_bad_inputs(tmp_path):
    with pytest.raises(PlotInputError, match="is empty"):
        load_path_csv(_write(tmp_path / "a.csv", ""))
    with pytest.raises(PlotInputError, match="no rows"):
        load_path_csv(_write(tmp_path / "b.csv", "t,x\n"))
    with pytest.raises(PlotInputError, match="expected columns t,x"):
        load_path_csv(_write(tmp_path / "c.csv", "time,value\n0,1\n"))
    with pytest.raises(PlotInputError, match="expected 2 fields"):
        load_path_csv(_write(tmp_path / "d.csv", "t,x\n0,1,2\n"))
    with pytest.raises(PlotInputError, match="not a number"):
        load_path_csv(_write(tmp_path / "e.csv", "t,x\n0,oops\n"))
    with pytest.raises(PlotInputError, match="must be finite"):
        load_path_csv(_write(tmp_path / "f.csv", "t,x\n0,\n"))
    with pytest.raises(PlotInputError, match="cannot read"):
        load_path_csv(str(tmp_path / "nope.csv"))


def test_plot_path_writes_a_png(tmp_path):
    out = str(tmp_path / "fig.png")
    assert plot_path(_path_csv(tmp_path), out) == out
    width, height = _png_size(out)
    assert (width, height) == (800, 320)


def test_plot_path_honors_the_title(tmp_path):
    csv_path = _path_csv(tmp_path)
    plot_path(csv_path, str(tmp_path / "plain.png"))
    plot_path(csv_path, str(tmp_path / "titled.png"), title="a path")
    plain = (tmp_path / "plain.png").read_bytes()
    titled = (tmp_path / "titled.png").read_bytes()
    assert plain != titled


def test_plot_path_is_deterministic(tmp_path):
    csv_path = _path_csv(tmp_path)
    for name in ("one.png", "two.png"):
        plot_path(csv_path, str(tmp_path / name), title="same")
    assert (tmp_path / "one.png").read_bytes() == \
           (tmp_path / "two.png").read_bytes()


def test_plot_path_writes_deterministic_svg(tmp_path):
    csv_path = _path_csv(tmp_path)
    for name in ("one.svg", "two.svg"):
        plot_path(csv_path, str(tmp_path / name))
    one = (tmp_path / "one.svg").read_bytes()
    assert one == (tmp_path / "two.svg").read_bytes()
    assert one.startswith(b"<?xml")


def test_plot_path_rejects_unknown_extensions(tmp_path):
    with pytest.raises(PlotInputError, match="unsupported image format"):
        plot_path(_path_csv(tmp_path), str(tmp_path / "fig.pdf"))


# surface CSVs

def test_load_surface_csv_places_values_on_the_grid(tmp_path):
    csv_path = _surface_csv(tmp_path, xs=(2.0, -2.0, 0.0), hs=(1.0, 2.0))
    grid = load_surface_csv(csv_path)
    assert_allclose(grid.xs, [-2.0, 0.0, 2.0])
    assert_allclose(grid.hs, [1.0, 2.0])
    assert grid.mean.shape == (2, 3)
    assert_allclose(grid.mean[0], [-1.8, 0.0, 1.8])
    assert_allclose(grid.var[1], [6.0, 2.0, 6.0])
    assert_allclose(grid.kurt[1], [2.0, 2.0, 2.0])


def test_load_surface_csv_leaves_holes_as_nan(tmp_path):
    csv_path = _surface_csv(tmp_path, missing=((0.0, 2.0),),
                            empty_fields=((2.0, 1.0),))
    grid = load_surface_csv(csv_path)
    assert np.isnan(grid.mean[1, 1])
    assert np.isnan(grid.mean[0, 2]) and np.isnan(grid.kurt[0, 2])
    assert np.isfinite(grid.mean[0, 0])


def test_surface_panels_sigma_is_the_square_root_of_var(tmp_path):
    grid = load_surface_csv(_surface_csv(tmp_path))
    panels = surface_panels(grid)
    assert [label for label, _ in panels] == \
        [r"$\mu$", r"$\sigma$", r"$\gamma_1$", r"$\gamma_2$"]
    assert_allclose(panels[1][1], np.sqrt(grid.var))


def test_load_surface_csv_without_kurt_warns(tmp_path):
    csv_path = _surface_csv(tmp_path, no_kurt=True)
    with pytest.warns(UserWarning, match="no kurtosis columns"):
        grid = load_surface_csv(csv_path)
    assert grid.kurt is None
    assert len(surface_panels(grid)) == 3


def test_load_surface_csv_rejects_bad_inputs(tmp_path):
    with pytest.raises(PlotInputError, match="expected columns x,h,mean"):
        load_surface_csv(_write(tmp_path / "a.csv", "x,h,mean\n1,1,0\n"))
    with pytest.raises(PlotInputError, match="no rows"):
        load_surface_csv(_surface_csv(tmp_path, xs=(), name="b.csv"))
    good = _surface_csv(tmp_path, name="c.csv")
    text = open(good, encoding="utf-8").read()
    bad = _write(tmp_path / "d.csv", text + "1.0,3.0,0.5\n")
    with pytest.raises(PlotInputError, match="expected 11 fields"):
        load_surface_csv(bad)
    bad = _write(tmp_path / "e.csv",
                 text.replace("-1.8", "-1.8e", 1))
    with pytest.raises(PlotInputError, match="not a number"):
        load_surface_csv(bad)


def test_plot_surface_writes_four_panels(tmp_path):
    out = str(tmp_path / "fig.png")
    plot_surface(_surface_csv(tmp_path), out)
    width, height = _png_size(out)
    assert (width, height) == (1440, 340)


def test_plot_surface_fallback_is_three_panels_wide(tmp_path):
    csv_path = _surface_csv(tmp_path, no_kurt=True)
    out = str(tmp_path / "fig.png")
    with pytest.warns(UserWarning, match="no kurtosis columns"):
        plot_surface(csv_path, out)
    width, _ = _png_size(out)
    assert width == 1080


def test_plot_surface_is_deterministic(tmp_path):
    csv_path = _surface_csv(tmp_path, empty_fields=((0.0, 1.0),))
    for name in ("one.png", "two.png"):
        plot_surface(csv_path, str(tmp_path / name))
    assert (tmp_path / "one.png").read_bytes() == \
           (tmp_path / "two.png").read_bytes()


def test_plot_surface_renders_undefined_cells(tmp_path):
    # one hatched hole, plus a panel that is masked everywhere, the
    # way skewness comes out below the tail index threshold
    csv_path = _surface_csv(tmp_path, empty_fields=((0.0, 1.0),))
    plot_surface(csv_path, str(tmp_path / "holes.png"))
    grid = load_surface_csv(csv_path)
    text = open(csv_path, encoding="utf-8").read()
    lines = text.splitlines()
    blanked = [lines[0]]
    for line in lines[1:]:
        f = line.split(",")
        f[6] = f[7] = f[8] = f[9] = ""
        blanked.append(",".join(f))
    csv_path = _write(tmp_path / "allnan.csv", "\n".join(blanked) + "\n")
    plot_surface(csv_path, str(tmp_path / "allnan.png"))
    assert _png_size(str(tmp_path / "allnan.png"))[0] == 1440
    assert np.isnan(grid.mean[0, 1])
