"""Figures rendered from the stable-anticipate CSV outputs.

This package never computes moments.  It reads the ``simulate`` and
``surface`` CSV schemas written by the stable-anticipate command line
tool and draws them with matplotlib: a sample-path line plot and a row
of conditional-moment heatmaps over the (x, h) grid.

Rendering is deterministic for fixed input and flags: fixed figure
sizes and dpi, the grayscale colormap (lower is darker, higher is
whiter), a fixed svg hash salt, and no timestamps in the output
metadata.  Grid cells whose moments do not exist arrive as empty CSV
fields and are drawn white with black hatching.
"""

import csv
import pathlib
import warnings
from collections import namedtuple

import numpy as np
import matplotlib
from matplotlib import colormaps

PATH_COLUMNS = ("t", "x")
SURFACE_COLUMNS = ("x", "h", "mean", "mean_err", "var", "var_err",
                   "skew", "skew_err", "kurt_ex", "kurt_err", "regime")
_SURFACE_NO_KURT = tuple(c for c in SURFACE_COLUMNS
                         if not c.startswith("kurt"))

_DPI = 100.0
_SVG_HASHSALT = "stable-anticipate-plots"

SurfaceGrid = namedtuple("SurfaceGrid", ["xs", "hs", "mean", "var",
                                         "skew", "kurt"])
SurfaceGrid.__doc__ += """

Moment values on the (h, x) grid, NaN where the CSV field was empty.
``kurt`` is None when the CSV has no kurtosis columns.
"""


class PlotInputError(ValueError):
    """A CSV input does not match the expected schema or content."""


def _read_rows(csv_path):
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise PlotInputError(f"cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise PlotInputError(f"{csv_path} is empty")
    return tuple(rows[0]), rows[1:]


def _cell(text, csv_path, line_no):
    if text == "":
        return np.nan
    try:
        return float(text)
    except ValueError:
        raise PlotInputError(f"{csv_path}, line {line_no}: "
                             f"not a number: {text!r}") from None


def load_path_csv(csv_path):
    """Read a simulated path CSV (columns t,x) into two float arrays."""
    header, rows = _read_rows(csv_path)
    if header != PATH_COLUMNS:
        raise PlotInputError(f"{csv_path}: expected columns t,x, got "
                             f"{','.join(header) or '(none)'}")
    if not rows:
        raise PlotInputError(f"{csv_path} has a header but no rows")
    t = np.empty(len(rows))
    x = np.empty(len(rows))
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise PlotInputError(f"{csv_path}, line {i + 2}: expected "
                                 f"2 fields, got {len(row)}")
        t[i] = _cell(row[0], csv_path, i + 2)
        x[i] = _cell(row[1], csv_path, i + 2)
    if not (np.isfinite(t).all() and np.isfinite(x).all()):
        raise PlotInputError(f"{csv_path}: path values must be finite")
    return t, x


def load_surface_csv(csv_path):
    """Read a moment-surface CSV into a SurfaceGrid of 2-D arrays.

    Accepts the full eleven-column schema or, with a warning, the
    nine-column variant without the kurtosis pair.
    """
    header, rows = _read_rows(csv_path)
    if header == SURFACE_COLUMNS:
        has_kurt = True
    elif header == _SURFACE_NO_KURT:
        has_kurt = False
        warnings.warn(f"{csv_path} has no kurtosis columns; falling back "
                      "to three panels", UserWarning, stacklevel=2)
    else:
        raise PlotInputError(f"{csv_path}: expected columns "
                             f"{','.join(SURFACE_COLUMNS)}, got "
                             f"{','.join(header) or '(none)'}")
    if not rows:
        raise PlotInputError(f"{csv_path} has a header but no rows")

    n_fields = len(header)
    records = []
    for i, row in enumerate(rows):
        if len(row) != n_fields:
            raise PlotInputError(f"{csv_path}, line {i + 2}: expected "
                                 f"{n_fields} fields, got {len(row)}")
        x = _cell(row[0], csv_path, i + 2)
        h = _cell(row[1], csv_path, i + 2)
        if not (np.isfinite(x) and np.isfinite(h)):
            raise PlotInputError(f"{csv_path}, line {i + 2}: x and h "
                                 "must be finite")
        vals = [_cell(row[j], csv_path, i + 2) for j in (2, 4, 6)]
        vals.append(_cell(row[8], csv_path, i + 2) if has_kurt else np.nan)
        records.append((x, h, vals))

    xs = np.unique([r[0] for r in records])
    hs = np.unique([r[1] for r in records])
    grids = [np.full((len(hs), len(xs)), np.nan) for _ in range(4)]
    for x, h, vals in records:
        ix = np.searchsorted(xs, x)
        ih = np.searchsorted(hs, h)
        for grid, val in zip(grids, vals):
            grid[ih, ix] = val
    return SurfaceGrid(xs, hs, grids[0], grids[1], grids[2],
                       grids[3] if has_kurt else None)


def surface_panels(grid):
    """Ordered (label, values) heatmap panels for a SurfaceGrid.

    The second panel is the conditional scale sigma, the square root
    of the CSV's variance column.
    """
    sigma = np.sqrt(np.where(grid.var >= 0.0, grid.var, np.nan))
    panels = [(r"$\mu$", grid.mean), (r"$\sigma$", sigma),
              (r"$\gamma_1$", grid.skew)]
    if grid.kurt is not None:
        panels.append((r"$\gamma_2$", grid.kurt))
    return panels


def _image_format(out_image):
    suffix = pathlib.PurePath(out_image).suffix.lower()
    if suffix not in (".png", ".svg"):
        raise PlotInputError(f"unsupported image format {suffix!r} for "
                             f"{out_image}; use .png or .svg")
    return suffix[1:]


def _save(fig, out_image, fmt):
    if fmt == "svg":
        with matplotlib.rc_context({"svg.hashsalt": _SVG_HASHSALT}):
            fig.savefig(out_image, format="svg", dpi=_DPI,
                        metadata={"Date": None})
    else:
        fig.savefig(out_image, format="png", dpi=_DPI)


def plot_path(csv_path, out_image, title=None):
    """Line plot of a simulated sample path CSV (columns t,x)."""
    fmt = _image_format(out_image)
    t, x = load_path_csv(csv_path)
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(8.0, 3.2), dpi=_DPI)
    try:
        ax.plot(t, x, color="black", linewidth=0.8)
        ax.set_xlabel("t")
        ax.set_ylabel("x")
        ax.margins(x=0.0)
        if title is not None:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, out_image, fmt)
    finally:
        plt.close(fig)
    return out_image


def plot_surface(csv_path, out_image, title=None):
    """Row of grayscale moment heatmaps from a surface CSV.

    Four panels (mu, sigma, gamma1, gamma2), or three when the CSV has
    no kurtosis columns.  Lower values are darker; cells with no
    defined moment are white with black hatching.
    """
    fmt = _image_format(out_image)
    grid = load_surface_csv(csv_path)
    panels = surface_panels(grid)
    import matplotlib.pyplot as plt
    fig, axes = plt.subplots(1, len(panels), sharey=True, dpi=_DPI,
                             figsize=(3.6 * len(panels), 3.4))
    try:
        for ax, (label, values) in zip(np.ravel(axes), panels):
            masked = np.ma.masked_invalid(values)
            cmap = colormaps["gray"].copy()
            cmap.set_bad("white")
            mesh = ax.pcolormesh(grid.xs, grid.hs, masked, cmap=cmap,
                                 shading="nearest")
            mask = np.ma.getmaskarray(masked)
            if mask.any():
                hole = np.ma.masked_where(~mask, np.zeros_like(values))
                ax.pcolor(grid.xs, grid.hs, hole, shading="nearest",
                          hatch="////", alpha=0.0)
            fig.colorbar(mesh, ax=ax, fraction=0.05, pad=0.04)
            ax.set_title(label)
            ax.set_xlabel("x")
        np.ravel(axes)[0].set_ylabel("h")
        if title is not None:
            fig.suptitle(title)
        fig.tight_layout()
        _save(fig, out_image, fmt)
    finally:
        plt.close(fig)
    return out_image
