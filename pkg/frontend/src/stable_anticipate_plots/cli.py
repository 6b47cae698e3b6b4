"""Command line front end for rendering stable-anticipate CSV files.

Two subcommands::

    stable-anticipate-plots path PATH_CSV OUT_IMAGE [--title TEXT]
    stable-anticipate-plots surface SURFACE_CSV OUT_IMAGE [--title TEXT]

The output format is chosen by the image extension (.png or .svg).
Exit codes: 0 success, 1 unreadable or malformed input, 2 usage error.
"""

import argparse
import sys

import matplotlib

from .figures import PlotInputError, plot_path, plot_surface


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stable-anticipate-plots",
        description="Render stable-anticipate CSV outputs as figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    path = sub.add_parser(
        "path", help="line plot of a simulated path CSV (columns t,x)")
    path.add_argument("csv_path", help="input CSV file")
    path.add_argument("out_image", help="output image (.png or .svg)")
    path.add_argument("--title", default=None, help="figure title")

    surface = sub.add_parser(
        "surface", help="grayscale heatmaps of a moment-surface CSV")
    surface.add_argument("csv_path", help="input CSV file")
    surface.add_argument("out_image", help="output image (.png or .svg)")
    surface.add_argument("--title", default=None, help="figure title")
    return parser


def main(argv=None):
    matplotlib.use("Agg")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "path":
            plot_path(args.csv_path, args.out_image, title=args.title)
        else:
            plot_surface(args.csv_path, args.out_image, title=args.title)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
