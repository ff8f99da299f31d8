"""pqfi-render command line: draw a canned figure from its CSV + manifest."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureJob, RenderError, render


def default_manifest(csv_path: str) -> str:
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return base + ".manifest.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqfi-render")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure to PNG + SVG")
    p.add_argument("--figure", type=int, required=True, help="figure id in 1..6")
    p.add_argument("--csv", required=True, help="sweep CSV path")
    p.add_argument("--manifest", default=None, help="manifest path (default: <csv>.manifest.json)")
    p.add_argument("--out", required=True, help="output image path (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = FigureJob(
        csv_path=args.csv,
        manifest_path=args.manifest or default_manifest(args.csv),
        figure_id=args.figure,
        out_path=args.out,
    )
    try:
        result = render(job)
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in result.paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
