"""Figure rendering for stable-anticipate CSV outputs."""

from .figures import (PATH_COLUMNS, SURFACE_COLUMNS, PlotInputError,
                      SurfaceGrid, load_path_csv, load_surface_csv,
                      plot_path, plot_surface, surface_panels)

__version__ = "0.1.0"

__all__ = [
    "PATH_COLUMNS", "PlotInputError", "SURFACE_COLUMNS", "SurfaceGrid",
    "load_path_csv", "load_surface_csv", "plot_path", "plot_surface",
    "surface_panels",
]
