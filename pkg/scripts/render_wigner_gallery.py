#!/usr/bin/env python3
"""Render the standard gallery of interference structures to CSV + PGM:
the displaced two-component cat, the compass state, the rotated-cat
product, and the displaced-compass product whose positive and negative
fringes cancel on integration."""

import argparse
import pathlib
import sys

import numpy as np

from subplanck.cli import main as cli


def run(outdir: pathlib.Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    alpha = "0+4i"
    theta = np.pi / 64  # quasi-orthogonal rotation of the displaced cat
    beta = np.pi / (2 * np.sqrt(2) * 4)  # compass quasi-orthogonal shift
    jobs = [
        ["wigner", "--alpha", alpha, "--m", "2", "--displace", alpha,
         "--out", str(outdir / "cat_displaced")],
        ["wigner", "--alpha", alpha, "--m", "4",
         "--out", str(outdir / "compass")],
        ["wigner", "--alpha", alpha, "--m", "2", "--displace", alpha,
         "--pert", "rotation", "--s", f"{theta:.17g}",
         "--out", str(outdir / "cat_rotated")],
        ["wigner", "--alpha", alpha, "--m", "2", "--displace", alpha, "--product",
         "--pert", "rotation", "--s", f"{theta:.17g}",
         "--out", str(outdir / "cat_rotation_product")],
        ["wigner", "--alpha", alpha, "--m", "4", "--product",
         "--pert", "displacement", "--s", f"{beta:.17g}", "--phi", f"{np.pi / 4:.17g}",
         "--out", str(outdir / "compass_shift_product")],
    ]
    for argv in jobs:
        print("$ subplanck " + " ".join(argv))
        code = cli(argv)
        if code != 0:
            return code
    print(f"wrote {len(list(outdir.glob('*.csv')))} CSV and {len(list(outdir.glob('*.pgm')))} PGM files to {outdir}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("gallery"))
    sys.exit(run(parser.parse_args().outdir))
