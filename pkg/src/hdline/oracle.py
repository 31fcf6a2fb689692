"""Independent brute-force verifiers.

These deliberately avoid the entropy/marginalization helpers of the
main modules: joints are materialized as dense plain-Python tables,
entropies computed with math.log2 loops, link outputs derived from the
channel semantics rather than the factorized shortcut, and codeword
counts from a multiplicative binomial.  Agreement tests against the
primary code paths are only meaningful because of this separation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .codec import DecodeError, PipelineCodec, simulate_blocks
from .model import NetworkTopology
from .regions import (
    ChainDistributionT1,
    ChainDistributionT2,
    ConstraintPoint,
    RateRegion,
    example_axis_crossing_p,
    example_region_point,
    example_sum_stationary_p,
)

TABLE_CAP = 10**7
DECODE_TUPLE_CAP = 10**6


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the hard budget cap."""


class InfeasibleConfigError(ValueError):
    """Slot allocation violates the construction's preconditions."""


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for j in range(k):
        out = out * (n - j) // (j + 1)
    return out


def _entropy_bits(values) -> float:
    return -sum(v * math.log2(v) for v in values if v > 0.0)


@dataclass(frozen=True)
class JointTable:
    """Dense joint pmf over named finite axes."""

    axes: tuple[str, ...]
    sizes: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        total = math.prod(self.sizes)
        if total > TABLE_CAP:
            raise BudgetExceededError(f"table of {total} entries exceeds cap {TABLE_CAP}")
        if len(self.probs) != total:
            raise ValueError("probability vector does not match the axis sizes")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"table sums to {sum(self.probs)}, not 1")

    def cells(self):
        for idx, p in zip(itertools.product(*(range(s) for s in self.sizes)), self.probs):
            yield idx, p

    def marginal(self, keep_axes) -> "JointTable":
        keep = [self.axes.index(a) for a in keep_axes]
        sizes = tuple(self.sizes[j] for j in keep)
        acc: dict[tuple, float] = {}
        for idx, p in self.cells():
            key = tuple(idx[j] for j in keep)
            acc[key] = acc.get(key, 0.0) + p
        probs = [0.0] * math.prod(sizes)
        for key, p in acc.items():
            flat = 0
            for j, s in zip(key, sizes):
                flat = flat * s + j
            probs[flat] = p
        return JointTable(tuple(keep_axes), sizes, tuple(probs))

    def as_matrix(self):
        if len(self.sizes) != 2:
            raise ValueError("matrix view needs exactly two axes")
        r, c = self.sizes
        return [[self.probs[i * c + j] for j in range(c)] for i in range(r)]


def materialize_joint(dist) -> JointTable:
    """Dense product of the chain factors of a T1 or T2 distribution."""
    if isinstance(dist, ChainDistributionT1):
        p0 = dist.p_x0.tolist()
        p1 = dist.p_x1.tolist()
        links = [L.tolist() for L in dist.links]
        sizes = [len(p0), len(p1)] + [len(L[0]) for L in links]
        axes = tuple(f"X{k}" for k in range(len(sizes)))
        probs = []
        for idx in itertools.product(*(range(s) for s in sizes)):
            p = p0[idx[0]] * p1[idx[1]]
            for j, L in enumerate(links):
                p *= L[idx[j + 1]][idx[j + 2]]
            probs.append(p)
        return JointTable(axes, tuple(sizes), tuple(probs))
    if isinstance(dist, ChainDistributionT2):
        p0 = dist.p_x0.tolist()
        p1 = dist.p_x1.tolist()
        links = [L.tolist() for L in dist.links]
        pu = dist.p_u_given_prev.tolist()
        plast = dist.p_last_given_u.tolist()
        chain_sizes = [len(p0), len(p1)] + [len(L[0]) for L in links]
        m = len(chain_sizes) + 1  # chain covers X_0..X_{m-2}
        sizes = chain_sizes + [len(pu[0]), len(plast[0])]
        axes = tuple(f"X{k}" for k in range(m - 1)) + ("U", f"X{m - 1}")
        probs = []
        for idx in itertools.product(*(range(s) for s in sizes)):
            p = p0[idx[0]] * p1[idx[1]]
            for j, L in enumerate(links):
                p *= L[idx[j + 1]][idx[j + 2]]
            p *= pu[idx[m - 2]][idx[m - 1]] * plast[idx[m - 1]][idx[m]]
            probs.append(p)
        return JointTable(axes, tuple(sizes), tuple(probs))
    raise TypeError(f"cannot materialize {type(dist).__name__}")


def _link_entropy_from_pair(pair_matrix, idle_cur: int) -> float:
    """H(Y_i | X_i) from the (X_{i-1}, X_i) pair law via the switch
    semantics: Y_i = X_i when transmitting, X_{i-1} when idle."""
    n_prev = len(pair_matrix)
    n_cur = len(pair_matrix[0])
    total = 0.0
    for xc in range(n_cur):
        p_xc = sum(pair_matrix[xp][xc] for xp in range(n_prev))
        if p_xc <= 0.0:
            continue
        out: dict = {}
        for xp in range(n_prev):
            y = ("prev", xp) if xc == idle_cur else ("cur", xc)
            out[y] = out.get(y, 0.0) + pair_matrix[xp][xc] / p_xc
        total += p_xc * _entropy_bits(out.values())
    return total


def t1_bounds_from_table(table: JointTable, topology: NetworkTopology):
    """(r0_bound, sum_bound) recomputed from the materialized joint."""
    m = topology.m
    r0 = _link_entropy_from_pair(
        table.marginal(("X0", "X1")).as_matrix(), topology.alphabets[1].idle_index
    )
    last = table.marginal((f"X{m - 1}",))
    sum_bound = _entropy_bits(last.probs)
    for i in range(2, m):
        pair = table.marginal((f"X{i - 1}", f"X{i}")).as_matrix()
        sum_bound = min(
            sum_bound, _link_entropy_from_pair(pair, topology.alphabets[i].idle_index)
        )
    return r0, sum_bound


def t2_bounds_from_table(table: JointTable, topology: NetworkTopology):
    """(r0_bound, rk_bound, sum_bound) recomputed from the full joint."""
    m = topology.m
    r0 = math.inf
    for i in range(1, m):
        pair = table.marginal((f"X{i - 1}", f"X{i}")).as_matrix()
        r0 = min(r0, _link_entropy_from_pair(pair, topology.alphabets[i].idle_index))
    u_last = table.marginal(("U", f"X{m - 1}")).as_matrix()
    rk = 0.0
    for row in u_last:
        p_u = sum(row)
        if p_u > 0.0:
            rk += p_u * _entropy_bits(v / p_u for v in row)
    sum_bound = _entropy_bits(table.marginal((f"X{m - 1}",)).probs)
    return r0, rk, sum_bound


def exact_count(n: int, n_vec, q_list) -> list[int]:
    """Exact big-integer codeword counts for relays 1..m-1.

    Node m-1 places its symbols anywhere (requires n_{m-1} < n); every
    other relay places them into the next relay's listen slots.
    """
    n_vec = list(n_vec)
    q_list = list(q_list)
    if len(q_list) != len(n_vec):
        raise InfeasibleConfigError("need one alphabet size per relay")
    if not 0 <= n_vec[-1] < n:
        raise InfeasibleConfigError(f"last relay needs 0 <= n_last < n, got {n_vec[-1]}")
    counts = []
    for j, (ni, q) in enumerate(zip(n_vec, q_list)):
        if j == len(n_vec) - 1:
            free = n
        else:
            free = n - n_vec[j + 1]
        if not 0 <= ni <= free:
            raise InfeasibleConfigError(f"relay {j + 1}: n_i={ni} exceeds {free} free slots")
        counts.append(q**ni * _binom(free, ni))
    return counts


def exhaustive_decode_check(
    pc: PipelineCodec, warmup_blocks: int | None = None
) -> tuple[bool, tuple | None]:
    """Run one steady-state pipeline per message tuple and assert that the
    sink and relay estimates are exact.  Returns (passed, counterexample);
    the counterexample is the first failing (w0, wk) tuple.
    """
    m0, m1 = pc.num_msgs
    if m0 * m1 > DECODE_TUPLE_CAP:
        raise BudgetExceededError(f"{m0 * m1} message tuples exceed cap {DECODE_TUPLE_CAP}")
    blocks = warmup_blocks if warmup_blocks is not None else pc.topology.m + 2
    for w0 in range(m0):
        for w1 in range(m1):
            sched0 = {b: w0 for b in range(-pc.topology.m, blocks + 1)}
            sched1 = {b: w1 for b in range(-pc.topology.m, blocks + 1)}
            trace = simulate_blocks(pc, sched0, sched1, blocks)
            if not trace.error_free:
                return False, (w0, w1)
            if trace.collisions != 0:
                return False, (w0, w1, "collision")
    return True, None


def _scan_frontier(points, r0_samples: int = 512) -> RateRegion:
    """Frontier assembly local to the oracle (kept separate from the
    primary implementation on purpose)."""
    r0_max = max(min(p.r0_bound, p.sum_bound) for p in points)
    xs = sorted(
        {r0_max * j / (r0_samples - 1) for j in range(r0_samples)}
        | {min(p.r0_bound, p.sum_bound) for p in points if p.r0_bound <= r0_max}
    )
    verts = []
    for x in xs:
        best = 0.0
        for p in points:
            if p.r0_bound >= x - 1e-12 and p.sum_bound >= x - 1e-12:
                best = max(best, max(0.0, p.sum_bound - x))
        verts.append((x, best))
    verts.append((r0_max, 0.0))
    return RateRegion(vertices=tuple(verts), achievers=(None,) * len(verts))


def fine_grid_example_scan(resolution: int) -> RateRegion:
    """Reference frontier for the three-node example: a uniform grid of
    idle probabilities plus the two analytic landmarks (the sum-rate
    stationary point p = 1/3 and the axis crossing found by bisection)
    that no uniform grid hits exactly."""
    if resolution < 11:
        raise ValueError("resolution must be at least 11")
    ps = [j / (resolution - 1) for j in range(resolution)]
    ps += [example_sum_stationary_p(), example_axis_crossing_p()]
    return _scan_frontier([example_region_point(p) for p in ps])


def example_axis_intercept() -> float:
    """Largest R_0 with R_1 = 0 in the example region, via bisection on
    p*log2(3) = (1-p) + h(p)."""
    return example_axis_crossing_p() * math.log2(3.0)


def example_max_sum_numeric() -> tuple[float, float]:
    """(best sum bound, achieving p) by fine sweep plus ternary search,
    independent of the analytic stationary point."""

    def f(p):
        return example_region_point(p).sum_bound

    ps = [j / 4096 for j in range(4097)]
    p0 = max(ps, key=f)
    lo, hi = max(0.0, p0 - 1e-3), min(1.0, p0 + 1e-3)
    for _ in range(200):
        a = lo + (hi - lo) / 3
        b = hi - (hi - lo) / 3
        if f(a) < f(b):
            lo = a
        else:
            hi = b
    p_best = 0.5 * (lo + hi)
    return f(p_best), p_best
