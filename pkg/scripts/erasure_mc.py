#!/usr/bin/env python3
"""Monte Carlo failure rate of the node-0 erasure code as a function of
the attempted rate, at a fixed listening fraction."""
import argparse
import math
import sys

from hdline.codec import erasure_failure_rate


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--idle-prob", type=float, default=0.5,
                    help="probability that relay 1 listens in a slot")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=13)
    args = ap.parse_args(argv)
    cap = args.idle_prob * math.log2(args.q + 1)
    print("rate_fraction,rate_bits,failure_rate")
    for j in range(args.steps):
        frac = 0.5 + 0.75 * j / (args.steps - 1)
        rate = frac * cap
        fail = erasure_failure_rate(
            args.n, args.q, rate, args.idle_prob, args.trials, args.seed
        )
        print(f"{frac:.4f},{rate:.6f},{fail:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
