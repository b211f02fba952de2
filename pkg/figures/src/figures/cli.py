"""Command line front end for the diagnostics figure renderers.

Usage:
    figures at-paths at_paths.csv --asset S1 --out fig1.png
    figures m-hist   m_hist.csv   --asset S1 --out fig2.png

Exit codes: 0 on success, 1 on a malformed request (missing file,
column, asset, or structure).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import FigureError, FigureSpec, __version__, plot_at_paths, plot_m_hist


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("csv", help="diagnostics CSV to read")
    sub.add_argument("--asset", required=True, help="asset label, e.g. S1")
    sub.add_argument("--out", required=True, help="image file to write")
    sub.add_argument(
        "--structures",
        default=None,
        help="comma separated structure labels to overlay (default: all)",
    )


def _spec(args: argparse.Namespace) -> FigureSpec:
    structures = None
    if args.structures is not None:
        structures = tuple(s.strip() for s in args.structures.split(",") if s.strip())
    return FigureSpec(
        csv_path=args.csv,
        asset=args.asset,
        out_path=args.out,
        structures=structures,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="render predictability diagnostics CSVs as figures",
    )
    parser.add_argument(
        "--version", action="version", version=f"figures {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    at = subparsers.add_parser(
        "at-paths", help="cumulative predictable paths A_t per structure"
    )
    _add_common(at)
    at.set_defaults(func=plot_at_paths)

    mh = subparsers.add_parser(
        "m-hist", help="overlaid histograms of estimated mean increments"
    )
    _add_common(mh)
    mh.set_defaults(func=plot_m_hist)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(_spec(args))
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
