"""Command-line front end: region computation, pipeline simulation, and
codebook-rate convergence studies, all with machine-readable output.

Exit codes: 0 success, 2 invalid configuration, 3 runtime infeasibility.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .codec import (
    InfeasibleError,
    asymptotic_rate_target,
    codebook_rate,
    erasure_failure_rate,
    run_pipeline,
)
from .model import NetworkTopology
from .oracle import BudgetExceededError
from .regions import (
    SearchConfig,
    default_card_u,
    example_axis_crossing_p,
    example_region_point,
    example_sum_stationary_p,
    frontier,
    maximize_t1_region,
    maximize_t2_region,
    time_sharing_region_example,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _parse_q(value: str, m: int) -> list[int]:
    parts = [int(tok) for tok in value.split(",")]
    if len(parts) == 1:
        parts = parts * m
    if len(parts) != m:
        raise ValueError(f"--q needs 1 or {m} values, got {len(parts)}")
    if any(q < 1 for q in parts):
        raise ValueError("every q must be >= 1")
    return parts


def _write_region_csv(path: str, region) -> None:
    lines = ["R0,Rk"]
    for x, y in region.vertices:
        lines.append(f"{x:.6f},{y:.6f}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _sidecar_path(path: str) -> str:
    stem = path[:-4] if path.endswith(".csv") else path
    return stem + ".json"


def _write_region_sidecar(path: str, region) -> None:
    records = [
        {"R0": x, "Rk": y, "params": ach}
        for (x, y), ach in zip(region.vertices, region.achievers)
    ]
    with open(path, "w") as fh:
        json.dump(records, fh, sort_keys=True, indent=1)
        fh.write("\n")


def cmd_region(args) -> int:
    topology = None
    if args.theorem in ("1", "2"):
        source_relay = 1 if args.theorem == "1" else args.m - 1
        try:
            qs = _parse_q(args.q, args.m)
            topology = NetworkTopology.uniform(args.m, qs, source_relay)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    config = SearchConfig(
        resolution=args.grid_resolution,
        refine_iters=args.refine_iters,
        seed=args.seed if args.seed is not None else 0,
    )
    if args.theorem == "example":
        ps = list(np.linspace(0.0, 1.0, args.resolution))
        ps += [example_sum_stationary_p(), example_axis_crossing_p()]
        region = frontier([example_region_point(float(p)) for p in ps])
    elif args.theorem == "timeshare":
        region = time_sharing_region_example()
    elif args.theorem == "1":
        region = maximize_t1_region(topology, config)
    else:
        if args.m < 3:
            print("error: theorem 2 needs m >= 3 (last relay distinct from the first)",
                  file=sys.stderr)
            return EXIT_CONFIG
        card_u = args.card_u if args.card_u is not None else default_card_u(topology)
        region = maximize_t2_region(topology, card_u, config)
    _write_region_csv(args.out, region)
    _write_region_sidecar(_sidecar_path(args.out), region)
    return EXIT_OK


def _symbols_json(seq) -> list:
    return ["N" if s.is_idle else int(s.index) for s in seq]


def cmd_simulate(args) -> int:
    try:
        qs = _parse_q(args.q, args.m)
        topology = NetworkTopology.uniform(args.m, qs, source_relay=1)
        n_vec = [int(tok) for tok in args.nvec.split(",")]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if len(n_vec) != args.m - 1:
        print(f"error: --nvec needs {args.m - 1} entries", file=sys.stderr)
        return EXIT_CONFIG
    records = []
    summary = {"blocks": args.blocks, "seed": args.seed}
    if args.blocks > 0:
        m0 = max(1, int(2.0 ** (args.n * args.rate0)))
        mk = max(1, int(2.0 ** (args.n * args.ratek)))
        trace = run_pipeline(topology, args.n, n_vec, (m0, mk), args.blocks, args.seed)
        for rec in trace.blocks:
            records.append(
                {
                    "block": rec.block,
                    "tx": {str(k): _symbols_json(v) for k, v in sorted(rec.tx.items())},
                    "rx": {str(k): _symbols_json(v) for k, v in sorted(rec.rx.items())},
                    "estimates": rec.estimates,
                    "correct": rec.correct,
                }
            )
        summary.update(
            {
                "num_msgs": list(trace.num_msgs),
                "errors_w0": trace.errors_w0,
                "errors_wk": trace.errors_wk,
                "decode_failures": trace.decode_failures,
                "collisions": trace.collisions,
                "throughput_bits_per_use": (
                    (trace.num_blocks * math.log2(trace.num_msgs[0])
                     + trace.num_blocks * math.log2(trace.num_msgs[1]))
                    / (trace.num_blocks * args.n)
                    if trace.num_blocks
                    else 0.0
                ),
            }
        )
    if args.trials > 0:
        idle_prob = 1.0 - n_vec[0] / args.n
        summary["erasure_failure_rate"] = erasure_failure_rate(
            args.n, qs[0], args.rate0, idle_prob, args.trials, args.seed
        )
        summary["erasure_trials"] = args.trials
    with open(args.out, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_convergence(args) -> int:
    try:
        ns = [int(tok) for tok in args.n.split(",")]
        q = int(args.q)
        if not (0.0 <= args.tau <= 1.0 and 0.0 <= args.alpha <= 1.0):
            raise ValueError("--tau and --alpha must lie in [0, 1]")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    target = asymptotic_rate_target(args.tau, args.alpha, q)
    lines = ["n,rate,target,gap"]
    for n in ns:
        n_next = round(args.tau * n)
        n_i = round(args.alpha * (n - n_next))
        if n_i < 0 or n_i > n - n_next:
            lines.append(f"{n},nan,{target:.6f},nan")
            continue
        count = q**n_i * math.comb(n - n_next, n_i)
        rate = codebook_rate(count, n)
        lines.append(f"{n},{rate:.6f},{target:.6f},{abs(rate - target):.6f}")
    with open(args.out, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdline",
        description="Capacity regions and timing-code simulation for "
        "noise-free half-duplex line networks with two sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_region = sub.add_parser("region", help="compute a rate-region frontier CSV")
    p_region.add_argument("--theorem", required=True, choices=["1", "2", "example", "timeshare"])
    p_region.add_argument("--m", type=int, default=2, help="sink index (number of hops)")
    p_region.add_argument("--q", default="2", help="transmission alphabet size(s), scalar or comma list")
    p_region.add_argument("--resolution", type=int, default=101,
                          help="idle-probability grid size for --theorem example")
    p_region.add_argument("--grid-resolution", type=int, default=6,
                          help="simplex grid resolution for the searches")
    p_region.add_argument("--refine-iters", type=int, default=60)
    p_region.add_argument("--card-u", type=int, default=None,
                          help="auxiliary-variable cardinality for theorem 2")
    p_region.add_argument("--seed", type=int, default=None)
    p_region.add_argument("--threads", type=int, default=1,
                          help="accepted for compatibility; results are identical for any value")
    p_region.add_argument("--out", required=True)
    p_region.set_defaults(func=cmd_region)

    p_sim = sub.add_parser("simulate", help="run the pipeline and/or the erasure Monte Carlo")
    p_sim.add_argument("--m", type=int, default=2)
    p_sim.add_argument("--q", default="2")
    p_sim.add_argument("--n", type=int, required=True, help="blocklength")
    p_sim.add_argument("--nvec", required=True, help="comma list n_1..n_{m-1}")
    p_sim.add_argument("--blocks", type=int, default=0)
    p_sim.add_argument("--rate0", type=float, default=0.0, help="source rate, bits per use")
    p_sim.add_argument("--ratek", type=float, default=0.0, help="relay-source rate, bits per use")
    p_sim.add_argument("--trials", type=int, default=0, help="erasure Monte Carlo trials")
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_conv = sub.add_parser("convergence", help="codebook rate vs its blocklength limit")
    p_conv.add_argument("--tau", type=float, required=True, help="n_{i+1}/n")
    p_conv.add_argument("--alpha", type=float, required=True, help="n_i/(n - n_{i+1})")
    p_conv.add_argument("--q", default="2")
    p_conv.add_argument("--n", required=True, help="comma list of blocklengths")
    p_conv.add_argument("--threads", type=int, default=1)
    p_conv.add_argument("--out", required=True)
    p_conv.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
