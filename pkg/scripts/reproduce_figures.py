#!/usr/bin/env python3
"""Regenerate every figure grid, then render images when pqfi-render exists."""

import argparse
import shutil
import subprocess
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--skip-render", action="store_true")
    args = parser.parse_args()

    figures = [str(i) for i in range(1, 7)]
    subprocess.run(["pqfi", "figure", *figures, "--out", args.out], check=True)

    if args.skip_render or shutil.which("pqfi-render") is None:
        if not args.skip_render:
            print("pqfi-render not installed; skipping image rendering")
        return 0

    for i in figures:
        subprocess.run(
            [
                "pqfi-render", "render",
                "--figure", i,
                "--csv", f"{args.out}/fig{i}.csv",
                "--out", f"{args.out}/fig{i}.png",
            ],
            check=True,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
