#!/usr/bin/env python3
"""Codebook rate vs. its blocklength limit for a grid of (tau, alpha)
slot fractions, one CSV per pair."""
import argparse
import pathlib
import sys

from hdline.cli import main as hdline


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", help="output directory")
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--n", default="16,32,64,128,256,512,1024")
    args = ap.parse_args(argv)
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for tau in (0.25, 0.5, 0.75):
        for alpha in (0.25, 0.5, 0.75):
            out = outdir / f"convergence_tau{tau}_alpha{alpha}.csv"
            rc = hdline(["convergence", "--tau", str(tau), "--alpha", str(alpha),
                         "--q", str(args.q), "--n", args.n, "--out", str(out)])
            if rc != 0:
                return rc
            print("wrote", out)
    return 0


if __name__ == "__main__":
    sys.exit(run())
