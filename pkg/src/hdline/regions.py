"""Capacity-region computation for the two source placements.

For the first-relay source the rate pair (R_0, R_1) must satisfy, for
some product-Markov input distribution,

    R_0       <= H(Y_1 | X_1)
    R_0 + R_1 <= min(H(Y_m), min_{2<=i<=m-1} H(Y_i | X_i)).

For the last-relay source an auxiliary variable U couples the last
relay to the rest of the chain and adds the individual bound
R_{m-1} <= H(Y_m | U).  The region is the union over distributions;
this module evaluates single distributions, extracts the Pareto
frontier of the union, and searches the distribution family with a
deterministic grid + coordinatewise refinement scheme.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .entropy import _check_pmf, conditional_output_entropy, entropy, binary_entropy
from .model import NetworkTopology

LOG2_3 = math.log2(3.0)
_EPS = 1e-9


class DimensionMismatchError(ValueError):
    """Distribution shapes do not match the topology alphabets."""


class UnsupportedTopologyError(ValueError):
    """Topology outside the range covered by the requested theorem."""


@dataclass(frozen=True)
class ChainDistributionT1:
    """Input family for the first-relay source: X_0 independent of the
    Markov chain X_1 - X_2 - ... - X_{m-1} (factorized storage).

    ``links[j]`` is P(X_{j+2} | X_{j+1}) with shape (|X_{j+1}|, |X_{j+2}|).
    """

    p_x0: np.ndarray
    p_x1: np.ndarray
    links: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "p_x0", _check_pmf(self.p_x0))
        object.__setattr__(self, "p_x1", _check_pmf(self.p_x1))
        links = tuple(np.asarray(L, dtype=float) for L in self.links)
        for L in links:
            for row in L:
                _check_pmf(row)
        object.__setattr__(self, "links", links)


@dataclass(frozen=True)
class ChainDistributionT2:
    """Input family for the last-relay source: the chain runs through an
    auxiliary variable, X_1 - ... - X_{m-2} - U - X_{m-1}, with X_0
    independent of everything else.

    ``links`` covers P(X_i | X_{i-1}) for i = 2..m-2 (empty when m = 3).
    """

    p_x0: np.ndarray
    p_x1: np.ndarray
    links: tuple[np.ndarray, ...]
    p_u_given_prev: np.ndarray  # (|X_{m-2}|, card_u)
    p_last_given_u: np.ndarray  # (card_u, |X_{m-1}|)

    def __post_init__(self):
        object.__setattr__(self, "p_x0", _check_pmf(self.p_x0))
        object.__setattr__(self, "p_x1", _check_pmf(self.p_x1))
        links = tuple(np.asarray(L, dtype=float) for L in self.links)
        for L in links:
            for row in L:
                _check_pmf(row)
        object.__setattr__(self, "links", links)
        for name in ("p_u_given_prev", "p_last_given_u"):
            M = np.asarray(getattr(self, name), dtype=float)
            for row in M:
                _check_pmf(row)
            object.__setattr__(self, name, M)
        if self.card_u < 1:
            raise DimensionMismatchError("card_u must be >= 1")

    @property
    def card_u(self) -> int:
        return self.p_u_given_prev.shape[1]


@dataclass(frozen=True)
class ConstraintPoint:
    """Right-hand sides of the rate constraints for one distribution."""

    r0_bound: float
    sum_bound: float
    rk_bound: float | None = None
    params: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.r0_bound < -_EPS or self.sum_bound < -_EPS:
            raise ValueError("bounds must be nonnegative")
        if self.rk_bound is not None and self.rk_bound < -_EPS:
            raise ValueError("bounds must be nonnegative")


@dataclass(frozen=True)
class RateRegion:
    """Upper boundary of the union region, as (R_0, R_k) vertices sorted
    by R_0 ascending with the R_k coordinate non-increasing."""

    vertices: tuple[tuple[float, float], ...]
    achievers: tuple = ()

    @property
    def r0_max(self) -> float:
        return self.vertices[-1][0]

    def rk_at(self, r0: float) -> float:
        """Boundary R_k at the given R_0 (linear interpolation; 0 beyond)."""
        if r0 > self.r0_max + _EPS:
            return 0.0
        xs, ys = [], []
        for x, y in self.vertices:
            if xs and x <= xs[-1] + 1e-15:
                ys[-1] = max(ys[-1], y)
            else:
                xs.append(x)
                ys.append(y)
        return float(np.interp(min(r0, xs[-1]), xs, ys))

    def max_sum_rate(self) -> float:
        return max(x + y for x, y in self.vertices)


# ---------------------------------------------------------------------------
# constraint evaluation


def _t1_pair_joints(p_x0, p_x1, links):
    """Pairwise joints (X_{i-1}, X_i) for i = 1..m-1 plus the X_{m-1} marginal."""
    pairs = [np.outer(p_x0, p_x1)]
    marg = p_x1
    for L in links:
        pairs.append(marg[:, None] * L)
        marg = marg @ L
    return pairs, marg


def _t1_bounds(p_x0, p_x1, links) -> tuple[float, float]:
    pairs, marg_last = _t1_pair_joints(p_x0, p_x1, links)
    r0 = conditional_output_entropy(pairs[0])
    sum_bound = entropy(marg_last)
    for pair in pairs[1:]:
        sum_bound = min(sum_bound, conditional_output_entropy(pair))
    return r0, sum_bound


def _check_t1_dims(dist: ChainDistributionT1, topology: NetworkTopology):
    sizes = [a.size for a in topology.alphabets]
    shapes = [dist.p_x0.shape[0], dist.p_x1.shape[0]]
    if len(dist.links) != topology.m - 2:
        raise DimensionMismatchError(
            f"expected {topology.m - 2} link kernels, got {len(dist.links)}"
        )
    for j, L in enumerate(dist.links):
        if L.shape != (sizes[j + 1], sizes[j + 2]):
            raise DimensionMismatchError(f"link {j} shape {L.shape} != {(sizes[j + 1], sizes[j + 2])}")
    if shapes != sizes[:2]:
        raise DimensionMismatchError(f"marginal sizes {shapes} != alphabet sizes {sizes[:2]}")


def t1_constraints(dist: ChainDistributionT1, topology: NetworkTopology) -> ConstraintPoint:
    """Constraint point for a first-relay-source distribution.

    For m = 2 the relay-chain minimum runs over an empty index set and
    the sum bound reduces to H(Y_m).
    """
    if topology.source_relay != 1:
        raise UnsupportedTopologyError("first-relay constraints need source_relay = 1")
    _check_t1_dims(dist, topology)
    r0, sum_bound = _t1_bounds(dist.p_x0, dist.p_x1, dist.links)
    params = {
        "p_x0": dist.p_x0.tolist(),
        "p_x1": dist.p_x1.tolist(),
        "links": [L.tolist() for L in dist.links],
    }
    return ConstraintPoint(r0, sum_bound, None, params)


def _t2_bounds(p_x0, p_x1, links, p_u_given_prev, p_last_given_u):
    pairs, marg_prev = _t1_pair_joints(p_x0, p_x1, links)
    p_u = marg_prev @ p_u_given_prev
    marg_last = p_u @ p_last_given_u
    # (X_{m-2}, X_{m-1}) joint through U
    pairs.append(marg_prev[:, None] * (p_u_given_prev @ p_last_given_u))
    r0 = min(conditional_output_entropy(pair) for pair in pairs)
    rk = float(sum(p_u[u] * entropy(p_last_given_u[u]) for u in range(p_u.size)))
    sum_bound = entropy(marg_last)
    return r0, rk, sum_bound, p_u


def t2_constraints(dist: ChainDistributionT2, topology: NetworkTopology) -> ConstraintPoint:
    """Constraint point for a last-relay-source distribution (m >= 3)."""
    if topology.m < 3:
        raise UnsupportedTopologyError("last-relay source needs m >= 3")
    if topology.source_relay != topology.m - 1:
        raise UnsupportedTopologyError("last-relay constraints need source_relay = m-1")
    sizes = [a.size for a in topology.alphabets]
    if len(dist.links) != topology.m - 3:
        raise DimensionMismatchError(f"expected {topology.m - 3} link kernels")
    if (
        dist.p_x0.shape[0] != sizes[0]
        or dist.p_x1.shape[0] != sizes[1]
        or dist.p_u_given_prev.shape[0] != sizes[topology.m - 2]
        or dist.p_last_given_u.shape[1] != sizes[topology.m - 1]
    ):
        raise DimensionMismatchError("marginal sizes do not match alphabet sizes")
    r0, rk, sum_bound, p_u = _t2_bounds(
        dist.p_x0, dist.p_x1, dist.links, dist.p_u_given_prev, dist.p_last_given_u
    )
    params = {
        "p_x0": dist.p_x0.tolist(),
        "p_x1": dist.p_x1.tolist(),
        "links": [L.tolist() for L in dist.links],
        "p_u_given_prev": dist.p_u_given_prev.tolist(),
        "p_last_given_u": dist.p_last_given_u.tolist(),
        "card_u": dist.card_u,
        # dependence diagnostic for the cut-set remark: I(X_{m-1}; U)
        "mi_last_u": max(0.0, sum_bound - rk),
    }
    return ConstraintPoint(r0, sum_bound, rk, params)


# ---------------------------------------------------------------------------
# closed-form three-node example and time-sharing baseline


def example_region_point(p: float) -> ConstraintPoint:
    """Closed-form constraint point of the three-node example at
    p = p_{X_1}(N): R_0 <= p*log2(3), R_0 + R_1 <= (1-p) + h(p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"idle probability {p} outside [0, 1]")
    return ConstraintPoint(
        p * LOG2_3, (1.0 - p) + binary_entropy(p), None, {"p_idle": p}
    )


def time_sharing_region_example() -> RateRegion:
    """Deterministic transmit/listen split for the three-node example:
    the segment between (0.5*log2(3), 0) and (0, log2(3))."""
    return RateRegion(
        vertices=((0.0, LOG2_3), (0.5 * LOG2_3, 0.0)), achievers=(None, None)
    )


def example_sum_stationary_p() -> float:
    """Idle probability maximizing the example sum bound (1-p) + h(p):
    the stationary condition (1-p)/p = 2 gives p = 1/3 exactly."""
    return 1.0 / 3.0


def example_axis_crossing_p(tol: float = 1e-14) -> float:
    """Idle probability where p*log2(3) meets (1-p) + h(p) (bisection)."""
    lo, hi = 0.5, 1.0

    def f(p):
        return p * LOG2_3 - ((1.0 - p) + binary_entropy(p))

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# frontier extraction


def frontier(points, r0_samples: int = 256) -> RateRegion:
    """Upper boundary of the union of the per-point constraint sets.

    At each R_0 sample the achievable R_k is the max over points with
    r0_bound >= R_0 and sum_bound >= R_0 of min(rk_bound, sum_bound - R_0),
    clipped at 0.  Samples are a fixed R_0 grid plus exact corner
    abscissas of every point.
    """
    points = list(points)
    if not points:
        raise ValueError("frontier of an empty point list")
    r0_max = max(min(p.r0_bound, p.sum_bound) for p in points)
    xs = set(np.linspace(0.0, r0_max, max(2, r0_samples)).tolist())
    for p in points:
        for corner in (min(p.r0_bound, p.sum_bound), p.r0_bound):
            if 0.0 <= corner <= r0_max:
                xs.add(corner)
        if p.rk_bound is not None:
            corner = p.sum_bound - p.rk_bound
            if 0.0 <= corner <= r0_max:
                xs.add(corner)
    verts, achievers = [], []
    for x in sorted(xs):
        best, who = 0.0, None
        for p in points:
            if p.r0_bound < x - _EPS or p.sum_bound < x - _EPS:
                continue
            rk = p.sum_bound - x
            if p.rk_bound is not None:
                rk = min(rk, p.rk_bound)
            rk = max(0.0, rk)
            if rk > best or who is None:
                best, who = rk, p
        verts.append([x, best])
        achievers.append(None if who is None else who.params)
    # enforce monotonicity against float dust
    for i in range(len(verts) - 2, -1, -1):
        verts[i][1] = max(verts[i][1], verts[i + 1][1])
    verts.append([r0_max, 0.0])
    achievers.append(achievers[-1])
    return RateRegion(
        vertices=tuple((float(x), float(y)) for x, y in verts),
        achievers=tuple(achievers),
    )


# ---------------------------------------------------------------------------
# deterministic search over the distribution families


@dataclass(frozen=True)
class SearchConfig:
    """Deterministic search parameters.

    The coarse stage is a simplex grid (small topologies) plus seeded
    Dirichlet samples; refinement is coordinatewise ascent with a
    shrinking step, run once per scalarized objective.
    """

    resolution: int = 6
    sweep_points: int = 5001
    r0_samples: int = 256
    refine_objectives: int = 33
    refine_iters: int = 60
    budget: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.budget <= 0:
            raise ValueError("search budget must be positive")


def _simplex_grid(k: int, resolution: int):
    """All pmfs over k atoms with masses that are multiples of 1/resolution."""
    for cuts in itertools.combinations(range(resolution + k - 1), k - 1):
        counts = []
        prev = -1
        for c in cuts:
            counts.append(c - prev - 1)
            prev = c
        counts.append(resolution + k - 2 - prev)
        yield np.array(counts, dtype=float) / resolution


def _symmetric_pmf(size: int, p_idle: float) -> np.ndarray:
    """Idle mass p, transmit mass split evenly (idle is the last index)."""
    q = size - 1
    out = np.full(size, (1.0 - p_idle) / q)
    out[-1] = p_idle
    return out


def _uniform(size: int) -> np.ndarray:
    return np.full(size, 1.0 / size)


def _coordinate_ascent(blocks, evaluate, iters):
    """Maximize evaluate(blocks) by perturbing one simplex entry at a
    time and renormalizing its block; the step shrinks when a full
    sweep brings no improvement."""
    blocks = [np.array(b, dtype=float) for b in blocks]
    best = evaluate(blocks)
    step = 0.25
    for _ in range(iters):
        improved = False
        for bi in range(len(blocks)):
            for k in range(blocks[bi].size):
                for delta in (step, -step):
                    trial = [b.copy() for b in blocks]
                    trial[bi][k] = max(0.0, trial[bi][k] + delta)
                    s = trial[bi].sum()
                    if s <= 0.0:
                        continue
                    trial[bi] /= s
                    val = evaluate(trial)
                    if val > best + 1e-12:
                        best, blocks = val, trial
                        improved = True
                        break
        if not improved:
            step *= 0.5
            if step < 1e-8:
                break
    return blocks, best


def _refine_points(coarse, blocks_of, bounds_of, point_of, config):
    """Refine coarse candidates toward the frontier.

    ``coarse``: list of (blocks, point).  Objectives: max sum bound,
    max R_0-axis reach, and max R_k at each R_0 of a fixed grid.
    """
    axis = max(min(p.r0_bound, p.sum_bound) for _, p in coarse)

    def obj_sum(pt):
        return pt.sum_bound

    def obj_axis(pt):
        return min(pt.r0_bound, pt.sum_bound)

    def obj_at(r0):
        def g(pt):
            if pt.r0_bound < r0:
                return pt.r0_bound - r0  # infeasible: climb toward feasibility
            rk = pt.sum_bound - r0
            if pt.rk_bound is not None:
                rk = min(rk, pt.rk_bound)
            return rk

        return g

    objectives = [obj_sum, obj_axis]
    objectives += [obj_at(r0) for r0 in np.linspace(0.0, axis, config.refine_objectives)]
    out = []
    for obj in objectives:
        start = max(coarse, key=lambda cp: obj(cp[1]))[0]
        blocks, _ = _coordinate_ascent(
            start, lambda bl: obj(point_of(bounds_of(bl))), config.refine_iters
        )
        out.append(point_of(bounds_of(blocks), blocks_of(blocks)))
    return out


def t1_candidate_points(topology: NetworkTopology, config: SearchConfig = SearchConfig()):
    """Collect constraint points for the first-relay-source search.

    Always includes the symmetric-uniform family (uniform X_0, equal
    transmit masses per relay, common idle probability swept finely).
    """
    if topology.source_relay != 1:
        raise UnsupportedTopologyError("first-relay search needs source_relay = 1")
    m = topology.m
    sizes = [a.size for a in topology.alphabets]
    n_links = m - 2

    def blocks_to_parts(blocks):
        p_x0, p_x1 = blocks[0], blocks[1]
        links, at = [], 2
        for j in range(n_links):
            rows = blocks[at : at + sizes[j + 1]]
            at += sizes[j + 1]
            links.append(np.vstack(rows))
        return p_x0, p_x1, tuple(links)

    def bounds_of(blocks):
        return _t1_bounds(*blocks_to_parts(blocks))

    def params_of(blocks):
        p_x0, p_x1, links = blocks_to_parts(blocks)
        return {
            "p_x0": p_x0.tolist(),
            "p_x1": p_x1.tolist(),
            "links": [L.tolist() for L in links],
        }

    def point_of(bounds, blocks=None):
        r0, s = bounds
        return ConstraintPoint(r0, s, None, None if blocks is None else params_of(blocks))

    candidates = []

    def sym_blocks(p_idle):
        blocks = [_uniform(sizes[0]), _symmetric_pmf(sizes[1], p_idle)]
        for j in range(n_links):
            blocks += [_symmetric_pmf(sizes[j + 2], p_idle)] * sizes[j + 1]
        return blocks

    for p_idle in np.linspace(0.0, 1.0, config.sweep_points):
        candidates.append(sym_blocks(float(p_idle)))
    candidates.append([_uniform(s) for s in (sizes[:2] + [sz for j in range(n_links) for sz in [sizes[j + 2]] * sizes[j + 1]])])

    if m == 2:
        for g0 in _simplex_grid(sizes[0], config.resolution):
            for g1 in _simplex_grid(sizes[1], config.resolution):
                candidates.append([g0, g1])
    else:
        rng = np.random.default_rng(config.seed)
        block_sizes = [sizes[0], sizes[1]]
        for j in range(n_links):
            block_sizes += [sizes[j + 2]] * sizes[j + 1]
        for _ in range(config.budget):
            candidates.append([rng.dirichlet(np.ones(s)) for s in block_sizes])

    coarse = [(bl, point_of(bounds_of(bl))) for bl in candidates]
    points = [point_of(bounds_of(bl), bl) for bl in candidates]
    points += _refine_points(coarse, lambda bl: bl, bounds_of, point_of, config)
    return points


def maximize_t1_region(
    topology: NetworkTopology, config: SearchConfig = SearchConfig()
) -> RateRegion:
    """Search the first-relay-source family and return the frontier."""
    return frontier(t1_candidate_points(topology, config), config.r0_samples)


def _t2_candidates_native(topology, card_u, config):
    m = topology.m
    sizes = [a.size for a in topology.alphabets]
    n_links = m - 3

    def blocks_to_parts(blocks):
        p_x0, p_x1 = blocks[0], blocks[1]
        links, at = [], 2
        for j in range(n_links):
            rows = blocks[at : at + sizes[j + 1]]
            at += sizes[j + 1]
            links.append(np.vstack(rows))
        u_rows = blocks[at : at + sizes[m - 2]]
        at += sizes[m - 2]
        last_rows = blocks[at : at + card_u]
        return (
            p_x0,
            p_x1,
            tuple(links),
            np.vstack(u_rows),
            np.vstack(last_rows),
        )

    def bounds_of(blocks):
        r0, rk, s, _ = _t2_bounds(*blocks_to_parts(blocks))
        return r0, rk, s

    def params_of(blocks):
        p_x0, p_x1, links, pu, plast = blocks_to_parts(blocks)
        r0, rk, s, _ = _t2_bounds(p_x0, p_x1, links, pu, plast)
        return {
            "p_x0": p_x0.tolist(),
            "p_x1": p_x1.tolist(),
            "links": [L.tolist() for L in links],
            "p_u_given_prev": pu.tolist(),
            "p_last_given_u": plast.tolist(),
            "card_u": card_u,
            "mi_last_u": max(0.0, s - rk),
        }

    def point_of(bounds, blocks=None):
        r0, rk, s = bounds
        return ConstraintPoint(r0, s, rk, None if blocks is None else params_of(blocks))

    block_sizes = [sizes[0], sizes[1]]
    for j in range(n_links):
        block_sizes += [sizes[j + 2]] * sizes[j + 1]
    block_sizes += [card_u] * sizes[m - 2]
    block_sizes += [sizes[m - 1]] * card_u

    candidates = [[_uniform(s) for s in block_sizes]]

    # two-parameter symmetric sweep: common idle probability for the
    # chain, separate idle probability for the last relay; U copies the
    # previous node when its cardinality allows, else stays uniform
    sweep = np.linspace(0.0, 1.0, 51)
    for p_chain in sweep:
        chain_blocks = [_uniform(sizes[0]), _symmetric_pmf(sizes[1], float(p_chain))]
        for j in range(n_links):
            chain_blocks += [_symmetric_pmf(sizes[j + 2], float(p_chain))] * sizes[j + 1]
        if card_u >= sizes[m - 2]:
            u_rows = [np.eye(card_u)[x] for x in range(sizes[m - 2])]
        else:
            u_rows = [_uniform(card_u)] * sizes[m - 2]
        for p_last in sweep:
            last_rows = [_symmetric_pmf(sizes[m - 1], float(p_last))] * card_u
            candidates.append(chain_blocks + u_rows + last_rows)

    rng = np.random.default_rng(config.seed + card_u)
    for _ in range(config.budget):
        candidates.append([rng.dirichlet(np.ones(s)) for s in block_sizes])

    coarse = [(bl, point_of(bounds_of(bl))) for bl in candidates]
    points = [point_of(bounds_of(bl), bl) for bl in candidates]
    points += _refine_points(coarse, lambda bl: bl, bounds_of, point_of, config)
    return points


def t2_candidate_points(
    topology: NetworkTopology, card_u: int, config: SearchConfig = SearchConfig()
):
    """Constraint points for the last-relay-source search.

    Accumulates candidates over auxiliary cardinalities 1..card_u, so
    the resulting region is non-decreasing in card_u by construction.
    """
    if topology.m < 3:
        raise UnsupportedTopologyError("last-relay source needs m >= 3")
    if topology.source_relay != topology.m - 1:
        raise UnsupportedTopologyError("last-relay search needs source_relay = m-1")
    if card_u < 1:
        raise ValueError("card_u must be >= 1")
    points = []
    for c in range(1, card_u + 1):
        points += _t2_candidates_native(topology, c, config)
    return points


def default_card_u(topology: NetworkTopology) -> int:
    """Default auxiliary cardinality |X_{m-1}| + 1 (no bound is known;
    monotonicity in card_u is reported instead)."""
    return topology.alphabets[topology.m - 1].size + 1


def maximize_t2_region(
    topology: NetworkTopology, card_u: int, config: SearchConfig = SearchConfig()
) -> RateRegion:
    """Search the last-relay-source family and return the frontier."""
    return frontier(t2_candidate_points(topology, card_u, config), config.r0_samples)
