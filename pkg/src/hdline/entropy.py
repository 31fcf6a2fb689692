"""Finite pmfs and the entropy functionals used in the rate constraints.

All entropies are in bits.  Pmf vectors over a node alphabet follow the
convention of ``model.Alphabet``: transmission symbols first, idle last.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


class InvalidPmfError(ValueError):
    """Vector is not a valid probability mass function."""


def _check_pmf(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidPmfError("pmf must be a nonempty 1-D vector")
    if (vec < 0).any():
        raise InvalidPmfError(f"negative probability: min {vec.min()}")
    if abs(vec.sum() - 1.0) > NORM_TOL:
        raise InvalidPmfError(f"probabilities sum to {vec.sum()}, not 1")
    return vec


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over a finite support."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _check_pmf(self.probs))
        self.probs.flags.writeable = False

    @classmethod
    def normalized(cls, weights) -> "Pmf":
        """Build from nonnegative weights, renormalizing explicitly."""
        w = np.asarray(weights, dtype=float)
        if (w < 0).any() or w.sum() <= 0:
            raise InvalidPmfError("weights must be nonnegative with positive sum")
        return cls(w / w.sum())

    def __len__(self):
        return self.probs.size

    def __getitem__(self, i):
        return float(self.probs[i])


@dataclass(frozen=True)
class ConditionalPmf:
    """One pmf row per conditioning value; rows[x] = P(. | X = x)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise InvalidPmfError("conditional pmf must be a 2-D matrix of rows")
        for r in rows:
            _check_pmf(r)
        object.__setattr__(self, "rows", rows)
        self.rows.flags.writeable = False


def _probs(p) -> np.ndarray:
    return p.probs if isinstance(p, Pmf) else np.asarray(p, dtype=float)


def entropy(p) -> float:
    """Shannon entropy in bits, with the 0*log(0) = 0 branch explicit."""
    vec = _probs(p)
    mask = vec > 0.0
    if not mask.any():
        return 0.0
    v = vec[mask]
    return float(-(v * np.log2(v)).sum())


def binary_entropy(p: float) -> float:
    """h(p) in bits; endpoints give 0."""
    if not 0.0 <= p <= 1.0:
        raise InvalidPmfError(f"binary entropy argument {p} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def conditional_output_entropy(joint) -> float:
    """H(Y_i | X_i) for the half-duplex link, from the (X_{i-1}, X_i) joint.

    ``joint[a, b]`` is P(X_{i-1} = a, X_i = b) with the idle symbol in
    the last column of axis 1.  Equals p_{X_i}(N) * H(X_{i-1} | X_i = N):
    whenever the relay transmits its output is deterministic.
    """
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise InvalidPmfError("joint must be a 2-D table over (X_prev, X_cur)")
    idle_col = joint[:, -1]
    p_idle = float(idle_col.sum())
    if p_idle <= 0.0:
        return 0.0
    return p_idle * entropy(idle_col / p_idle)


def sink_entropy(p) -> float:
    """H(Y_m) = H(X_{m-1}): the sink observes the last relay directly."""
    return entropy(p)
