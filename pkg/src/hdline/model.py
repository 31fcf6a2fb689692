"""Deterministic half-duplex line network: symbols, topology, per-block evaluation.

Nodes 0..m form a path; node 0 is the source, node m the sink, nodes
1..m-1 are half-duplex relays.  Each relay either transmits one of its
q transmission symbols or stays idle; an idle relay hears the previous
node through a perfect pipe, a transmitting relay hears itself.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class InvalidInputError(ValueError):
    """Symbol or sequence inconsistent with the declared alphabets."""


@dataclass(frozen=True)
class Symbol:
    """Channel input: transmission symbol ``tx(i)`` or the idle marker.

    Idle is a dedicated variant (index None), never encoded as an extra
    integer, so alphabets of different sizes cannot be confused.
    """

    index: Optional[int] = None

    def __post_init__(self):
        if self.index is not None and self.index < 0:
            raise InvalidInputError(f"negative symbol index {self.index}")

    @property
    def is_idle(self) -> bool:
        return self.index is None

    def __repr__(self):
        return "N" if self.is_idle else f"Tx({self.index})"


IDLE = Symbol()


def tx(index: int) -> Symbol:
    """Transmission symbol with the given per-alphabet index."""
    return Symbol(index)


@dataclass(frozen=True)
class Alphabet:
    """q transmission symbols (indices 0..q-1) plus the idle symbol.

    Pmf vectors over this alphabet use the convention: indices 0..q-1
    are the transmission symbols, index q is idle.
    """

    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidInputError("alphabet needs at least one transmission symbol")

    @property
    def size(self) -> int:
        """Total input alphabet size |X_k| = q + 1."""
        return self.q + 1

    @property
    def idle_index(self) -> int:
        return self.q

    def contains(self, s: Symbol) -> bool:
        return s.is_idle or s.index < self.q

    def index_of(self, s: Symbol) -> int:
        if not self.contains(s):
            raise InvalidInputError(f"{s} not in alphabet of size {self.size}")
        return self.q if s.is_idle else s.index

    def symbol_at(self, i: int) -> Symbol:
        if not 0 <= i <= self.q:
            raise InvalidInputError(f"index {i} out of range for alphabet q={self.q}")
        return IDLE if i == self.q else Symbol(i)


@dataclass(frozen=True)
class NetworkTopology:
    """Line network with sink index m and per-node transmission alphabets.

    ``alphabets`` covers nodes 0..m-1; the sink never transmits and
    carries no alphabet.  ``source_relay`` marks which relay injects its
    own message (1 or m-1).
    """

    m: int
    alphabets: tuple[Alphabet, ...]
    source_relay: int = 1

    def __post_init__(self):
        if self.m < 2:
            raise InvalidInputError("need m >= 2 (at least one relay)")
        if len(self.alphabets) != self.m:
            raise InvalidInputError(
                f"expected {self.m} alphabets (nodes 0..{self.m - 1}), got {len(self.alphabets)}"
            )
        if self.source_relay not in (1, self.m - 1):
            raise InvalidInputError("source relay must be node 1 or node m-1")

    @classmethod
    def uniform(cls, m: int, q, source_relay: int = 1) -> "NetworkTopology":
        """Topology with per-node q given as a scalar or a length-m sequence."""
        qs = [q] * m if isinstance(q, int) else list(q)
        return cls(m, tuple(Alphabet(qi) for qi in qs), source_relay)


@dataclass(frozen=True)
class BlockInput:
    """Length-n input sequences for nodes 0..m-1."""

    sequences: tuple[tuple[Symbol, ...], ...]

    def __post_init__(self):
        if not self.sequences:
            raise InvalidInputError("empty block")
        n = len(self.sequences[0])
        if n < 1 or any(len(s) != n for s in self.sequences):
            raise InvalidInputError("all node sequences must share a length n >= 1")

    @property
    def n(self) -> int:
        return len(self.sequences[0])


def link_output(x_prev: Symbol, x_cur: Symbol) -> Symbol:
    """Output of link (k-1,k): the half-duplex switch.

    A transmitting relay hears itself; an idle relay hears the previous
    node through a perfect pipe.
    """
    return x_prev if x_cur.is_idle else x_cur


def sink_output(x_prev: Symbol) -> Symbol:
    """The sink is full-duplex and always listens: Y_m = X_{m-1}."""
    return x_prev


def evaluate_block(
    topology: NetworkTopology, block: BlockInput
) -> tuple[tuple[Symbol, ...], ...]:
    """Evaluate one block: returns output sequences Y_1..Y_m.

    Fully deterministic and slot-independent.  Raises InvalidInputError
    on alphabet mismatch.
    """
    m = topology.m
    if len(block.sequences) != m:
        raise InvalidInputError(f"expected {m} input sequences, got {len(block.sequences)}")
    for k, seq in enumerate(block.sequences):
        alph = topology.alphabets[k]
        for s in seq:
            if not alph.contains(s):
                raise InvalidInputError(f"node {k}: {s} not in alphabet q={alph.q}")
    outputs = []
    for k in range(1, m):
        prev, cur = block.sequences[k - 1], block.sequences[k]
        outputs.append(tuple(link_output(p, c) for p, c in zip(prev, cur)))
    outputs.append(tuple(sink_output(s) for s in block.sequences[m - 1]))
    return tuple(outputs)
