"""Constructive coding scheme for the first-relay source.

Relays convey information through timing: each relay places a fixed
number of transmission symbols into the slots where the next relay
listens, so adjacent relays never transmit simultaneously and each
codeword is recovered exactly from the listened slots.  Node 0 treats
its link to relay 1 as an erasure channel (erasures where relay 1
transmits) and uses a seeded random code over its full alphabet,
including the idle symbol as a data symbol.

Codebooks are never materialized: messages are ranked/unranked
arithmetically (patterns in colexicographic order, symbol assignments
in odometer order), giving O(n) encode/decode even when the codeword
count is astronomically large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import binary_entropy
from .model import IDLE, NetworkTopology, Symbol, BlockInput, evaluate_block

_ANALYTIC_MC_CAP = 1 << 16  # largest codebook simulated explicitly


class InfeasibleError(ValueError):
    """Requested slot allocation or rate cannot be realized."""


class DecodeError(ValueError):
    """Received sequence is not a valid codeword."""


class AmbiguityError(DecodeError):
    """Two or more codewords are consistent with the received sequence."""


@dataclass(frozen=True)
class TxPattern:
    """Ordered transmit-slot set of one codeword within a block."""

    n: int
    slots: tuple[int, ...]

    def __post_init__(self):
        slots = tuple(sorted(self.slots))
        object.__setattr__(self, "slots", slots)
        if any(not 0 <= s < self.n for s in slots) or len(set(slots)) != len(slots):
            raise InfeasibleError(f"invalid slot set {slots} for n={self.n}")

    @property
    def listen_slots(self) -> tuple[int, ...]:
        used = set(self.slots)
        return tuple(t for t in range(self.n) if t not in used)


def _colex_rank(local_slots) -> int:
    return sum(math.comb(c, j + 1) for j, c in enumerate(local_slots))


def _colex_unrank(rank: int, n_items: int, k: int) -> list[int]:
    out = [0] * k
    while k > 0:
        n_items -= 1
        offset = math.comb(n_items, k)
        if rank >= offset:
            rank -= offset
            k -= 1
            out[k] = n_items
    return out


class PatternCodebook:
    """Timing codebook of one relay: n_tx transmission symbols placed in
    the allowed slots (the parent's listen slots, or the whole block for
    the last relay), idle elsewhere.

    Message index = pattern_rank * q**n_tx + symbol_rank, patterns in
    colexicographic order over the allowed-slot list, symbols as base-q
    digits with the first transmit slot most significant.
    """

    def __init__(self, n: int, n_tx: int, q: int, parent: TxPattern | None = None):
        if q < 1:
            raise InfeasibleError("need at least one transmission symbol")
        allowed = tuple(range(n)) if parent is None else parent.listen_slots
        if parent is None and not 0 <= n_tx < n:
            raise InfeasibleError(f"last relay needs 0 <= n_tx < n, got n_tx={n_tx}, n={n}")
        if n_tx < 0 or n_tx > len(allowed):
            raise InfeasibleError(
                f"n_tx={n_tx} exceeds the {len(allowed)} available listen slots"
            )
        if parent is not None and parent.n != n:
            raise InfeasibleError("parent pattern blocklength mismatch")
        self.n = n
        self.n_tx = n_tx
        self.q = q
        self.parent = parent
        self.allowed = allowed
        self.count = q**n_tx * math.comb(len(allowed), n_tx)

    def pattern(self, message: int) -> TxPattern:
        self._check_message(message)
        pat_rank = message // (self.q**self.n_tx)
        local = _colex_unrank(pat_rank, len(self.allowed), self.n_tx)
        return TxPattern(self.n, tuple(self.allowed[j] for j in local))

    def encode(self, message: int) -> tuple[Symbol, ...]:
        self._check_message(message)
        pat_rank, sym_rank = divmod(message, self.q**self.n_tx)
        local = _colex_unrank(pat_rank, len(self.allowed), self.n_tx)
        seq = [IDLE] * self.n
        digits = []
        for _ in range(self.n_tx):
            sym_rank, d = divmod(sym_rank, self.q)
            digits.append(d)
        digits.reverse()
        for j, d in zip(local, digits):
            seq[self.allowed[j]] = Symbol(d)
        return tuple(seq)

    def decode(self, seq) -> int:
        if len(seq) != self.n:
            raise DecodeError(f"sequence length {len(seq)} != n={self.n}")
        pos = {slot: j for j, slot in enumerate(self.allowed)}
        local, digits = [], []
        for t, s in enumerate(seq):
            if s.is_idle:
                continue
            if t not in pos:
                raise DecodeError(f"transmission outside the allowed slots at slot {t}")
            if s.index >= self.q:
                raise DecodeError(f"symbol {s} outside alphabet q={self.q}")
            local.append(pos[t])
            digits.append(s.index)
        if len(local) != self.n_tx:
            raise DecodeError(f"expected {self.n_tx} transmit slots, found {len(local)}")
        sym_rank = 0
        for d in digits:
            sym_rank = sym_rank * self.q + d
        return _colex_rank(local) * self.q**self.n_tx + sym_rank

    def _check_message(self, message: int):
        if not 0 <= message < self.count:
            raise InfeasibleError(f"message {message} outside codebook of size {self.count}")


def build_last_relay_codebook(n: int, n_last: int, q: int) -> PatternCodebook:
    """Codebook of node m-1: n_last < n symbols placed anywhere in the block."""
    return PatternCodebook(n, n_last, q, parent=None)


def build_adapted_codebook(n: int, n_i: int, q: int, parent: TxPattern) -> PatternCodebook:
    """Codebook of node i adapted to the next relay's pattern: symbols go
    only into the parent's listen slots, idle where the parent transmits."""
    return PatternCodebook(n, n_i, q, parent=parent)


def codebook_rate(count: int, n: int) -> float:
    """Rate in bits per channel use from an exact big-integer count."""
    if count < 1 or n < 1:
        raise InfeasibleError("count and n must be positive")
    return math.log2(count) / n


def asymptotic_rate_target(tau_next: float, alpha: float, q_size: int) -> float:
    """Blocklength limit of the adapted-codebook rate for fixed fractions
    tau_next = n_{i+1}/n and alpha = n_i/(n - n_{i+1}):

        (1 - tau_next) * (h(alpha) + alpha * log2(q_size)).
    """
    if not (0.0 <= tau_next <= 1.0 and 0.0 <= alpha <= 1.0):
        raise InfeasibleError("fractions must lie in [0, 1]")
    if q_size < 1:
        raise InfeasibleError("alphabet size must be >= 1")
    return (1.0 - tau_next) * (binary_entropy(alpha) + alpha * math.log2(q_size))


# ---------------------------------------------------------------------------
# erasure code of node 0


class ErasureCodebook:
    """Seeded random code over the full node-0 alphabet (idle included as
    a data symbol).  Codewords are stored as integers 0..q with the idle
    symbol at index q."""

    def __init__(self, n: int, q: int, codewords: np.ndarray):
        self.n = n
        self.q = q
        self.codewords = np.asarray(codewords, dtype=np.int64)
        if self.codewords.ndim != 2 or self.codewords.shape[1] != n:
            raise InfeasibleError("codeword table must be (messages, n)")
        if self.codewords.min() < 0 or self.codewords.max() > q:
            raise InfeasibleError("codeword symbol outside the alphabet")

    @property
    def num_messages(self) -> int:
        return self.codewords.shape[0]

    @classmethod
    def random(cls, n: int, q: int, num_messages: int, seed: int) -> "ErasureCodebook":
        rng = np.random.default_rng(seed)
        return cls(n, q, rng.integers(0, q + 1, size=(num_messages, n)))

    @classmethod
    def with_min_distance(
        cls, n: int, q: int, num_messages: int, min_dist: int, seed: int = 0,
        attempts: int = 20000,
    ) -> "ErasureCodebook":
        """Codebook whose codewords are pairwise distinguishable under any
        erasure of fewer than min_dist positions.  Random draws with a
        deterministic full-distance fallback for two messages."""
        if min_dist > n:
            raise InfeasibleError(f"min distance {min_dist} exceeds blocklength {n}")
        rng = np.random.default_rng(seed)
        rows = [rng.integers(0, q + 1, size=n)]
        for _ in range(num_messages - 1):
            for attempt in range(attempts + 1):
                if attempt == attempts:
                    if num_messages == 2:
                        cand = (rows[0] + 1) % (q + 1)  # differs in every position
                    else:
                        raise InfeasibleError(
                            f"no codeword at distance {min_dist} found in {attempts} draws"
                        )
                else:
                    cand = rng.integers(0, q + 1, size=n)
                if all(int((cand != r).sum()) >= min_dist for r in rows):
                    rows.append(cand)
                    break
        return cls(n, q, np.vstack(rows))

    def encode(self, message: int) -> tuple[Symbol, ...]:
        if not 0 <= message < self.num_messages:
            raise InfeasibleError(f"message {message} outside codebook")
        return tuple(IDLE if v == self.q else Symbol(int(v)) for v in self.codewords[message])

    def decode(self, received, erased_positions) -> int:
        """Unique codeword consistent with the unerased positions.

        Ambiguity (two or more consistent codewords) is a decoding
        failure and is never resolved arbitrarily.
        """
        if len(received) != self.n:
            raise DecodeError(f"sequence length {len(received)} != n={self.n}")
        erased = set(erased_positions)
        keep = np.array([t for t in range(self.n) if t not in erased], dtype=np.int64)
        if keep.size == 0:
            matches = np.arange(self.num_messages)
        else:
            obs = np.array(
                [self.q if received[t].is_idle else received[t].index for t in keep],
                dtype=np.int64,
            )
            matches = np.nonzero((self.codewords[:, keep] == obs).all(axis=1))[0]
        if matches.size == 0:
            raise DecodeError("no codeword consistent with the received sequence")
        if matches.size > 1:
            raise AmbiguityError(f"{matches.size} codewords consistent with the received sequence")
        return int(matches[0])


def erasure_failure_rate(
    n: int,
    q: int,
    rate_bits: float,
    idle_prob: float,
    trials: int,
    seed: int,
    explicit: bool | None = None,
) -> float:
    """Seeded Monte Carlo estimate of the erasure-decoding failure rate
    for a random code of rate ``rate_bits`` over the (q+1)-ary alphabet,
    each position erased independently with probability 1 - idle_prob.

    When the codebook is small enough it is materialized and decoded
    explicitly.  Otherwise (2^(n*rate) codewords cannot be stored) the
    ambiguity event is drawn from its exact conditional law under the
    i.i.d. uniform codebook ensemble: given u unerased positions, each
    competing codeword agrees with the observation independently with
    probability (q+1)^(-u), so some competitor agrees with probability
    1 - (1 - (q+1)^(-u))^(M-1).
    """
    if trials < 1:
        raise InfeasibleError("need at least one trial")
    if not 0.0 <= idle_prob <= 1.0:
        raise InfeasibleError("idle probability must lie in [0, 1]")
    log2_m = n * rate_bits
    rng = np.random.default_rng(seed)
    if explicit is None:
        explicit = log2_m <= math.log2(_ANALYTIC_MC_CAP)
    failures = 0
    if explicit:
        num_messages = max(2, int(2.0**log2_m))
        book = ErasureCodebook.random(n, q, num_messages, seed=seed + 1)
        for _ in range(trials):
            w = int(rng.integers(num_messages))
            erased = np.nonzero(rng.random(n) >= idle_prob)[0]
            sent = book.encode(w)
            try:
                ok = book.decode(sent, erased) == w
            except DecodeError:
                ok = False
            failures += not ok
        return failures / trials
    num_competitors = 2.0**log2_m - 1.0
    log_sym = math.log2(q + 1)
    for _ in range(trials):
        unerased = int(rng.binomial(n, idle_prob))
        p_match = 2.0 ** (-unerased * log_sym)
        if p_match >= 1.0:
            p_fail = 1.0
        else:
            p_fail = -math.expm1(num_competitors * math.log1p(-p_match))
        failures += rng.random() < p_fail
    return failures / trials


# ---------------------------------------------------------------------------
# block-Markov pipeline


@dataclass
class BlockRecord:
    block: int
    tx: dict
    rx: dict
    estimates: dict
    correct: bool
    collisions: int


@dataclass
class PipelineTrace:
    """Per-block record of a multi-block simulation plus error tallies."""

    blocks: list[BlockRecord]
    num_blocks: int
    num_msgs: tuple[int, int]
    collisions: int = 0
    errors_w0: int = 0
    errors_wk: int = 0
    decode_failures: int = 0

    @property
    def error_free(self) -> bool:
        return self.errors_w0 == 0 and self.errors_wk == 0 and self.decode_failures == 0


class PipelineCodec:
    """All codebooks of one pipeline configuration.

    ``n_vec[i-1]`` is the per-block transmission-symbol count of relay i.
    The combined relay message is w0 * num_msgs[1] + w1; every relay
    codebook must hold at least num_msgs[0] * num_msgs[1] codewords.
    """

    def __init__(
        self,
        topology: NetworkTopology,
        n: int,
        n_vec,
        num_msgs: tuple[int, int],
        erasure_book: ErasureCodebook | None = None,
        seed: int = 0,
    ):
        if topology.source_relay != 1:
            raise InfeasibleError("the constructive scheme needs the source at relay 1")
        m = topology.m
        n_vec = tuple(int(v) for v in n_vec)
        if len(n_vec) != m - 1:
            raise InfeasibleError(f"n_vec must list n_1..n_{m - 1}")
        self.topology = topology
        self.n = n
        self.n_vec = n_vec
        self.num_msgs = (int(num_msgs[0]), int(num_msgs[1]))
        self.last_book = build_last_relay_codebook(
            n, n_vec[-1], topology.alphabets[m - 1].q
        )
        # feasibility of the whole allocation, last relay first
        next_tx = n_vec[-1]
        for i in range(m - 2, 0, -1):
            if n_vec[i - 1] > n - next_tx:
                raise InfeasibleError(
                    f"relay {i}: n_i={n_vec[i - 1]} exceeds the {n - next_tx} listen slots"
                )
            next_tx = n_vec[i - 1]
        self._adapted: dict[tuple[int, tuple[int, ...]], PatternCodebook] = {}
        pair_count = self.num_msgs[0] * self.num_msgs[1]
        for i in range(1, m):
            count = self.book_count(i)
            if count < pair_count:
                raise InfeasibleError(
                    f"relay {i} codebook holds {count} codewords < {pair_count} message pairs"
                )
        if erasure_book is None:
            erasure_book = ErasureCodebook.random(
                n, topology.alphabets[0].q, self.num_msgs[0], seed=seed
            )
        if erasure_book.num_messages < self.num_msgs[0]:
            raise InfeasibleError("erasure codebook smaller than the node-0 message count")
        self.erasure_book = erasure_book

    def book_count(self, i: int) -> int:
        m = self.topology.m
        q = self.topology.alphabets[i].q
        if i == m - 1:
            return q ** self.n_vec[-1] * math.comb(self.n, self.n_vec[-1])
        free = self.n - self.n_vec[i]
        return q ** self.n_vec[i - 1] * math.comb(free, self.n_vec[i - 1])

    def relay_book(self, i: int, parent_pattern: TxPattern | None) -> PatternCodebook:
        m = self.topology.m
        if i == m - 1:
            return self.last_book
        key = (i, parent_pattern.slots)
        book = self._adapted.get(key)
        if book is None:
            book = build_adapted_codebook(
                self.n, self.n_vec[i - 1], self.topology.alphabets[i].q, parent_pattern
            )
            self._adapted[key] = book
        return book

    def combine(self, w0: int, w1: int) -> int:
        return w0 * self.num_msgs[1] + w1

    def split(self, combined: int) -> tuple[int, int]:
        return divmod(combined, self.num_msgs[1])


def _sched_get(schedule, b):
    return int(schedule.get(b, 0)) if isinstance(schedule, dict) else int(schedule(b))


def simulate_blocks(pc: PipelineCodec, w0_sched, w1_sched, blocks: int) -> PipelineTrace:
    """Run the pipeline for the given message schedules (dicts block->message,
    default 0 for warm-up indices <= 0).

    Relays re-encode their own decoded estimates, so a decoding failure
    at the erasure link propagates honestly downstream.  Adjacent-relay
    collisions are counted and must be zero by construction.
    """
    topo, n, m = pc.topology, pc.n, pc.topology.m
    M0, M1 = pc.num_msgs
    # per-node beliefs about source messages / relay-source messages
    belief_w0 = {i: {} for i in range(1, m + 1)}
    belief_w1 = {i: {} for i in range(2, m + 1)}
    trace = PipelineTrace(blocks=[], num_blocks=blocks, num_msgs=pc.num_msgs)
    for b in range(1, blocks + 1):
        tx_seqs: dict[int, tuple[Symbol, ...]] = {}
        patterns: dict[int, TxPattern] = {}
        for i in range(m - 1, 0, -1):
            idx0, idx1 = b - i, b - (i - 1)
            if i == 1:
                w0_i = belief_w0[1].get(idx0, _sched_get(w0_sched, idx0)) if idx0 >= 1 else _sched_get(w0_sched, idx0)
                w1_i = _sched_get(w1_sched, idx1)
            else:
                w0_i = belief_w0[i].get(idx0, _sched_get(w0_sched, idx0) if idx0 < 1 else 0)
                w1_i = belief_w1[i].get(idx1, _sched_get(w1_sched, idx1) if idx1 < 1 else 0)
            book = pc.relay_book(i, patterns.get(i + 1))
            combined = pc.combine(w0_i % M0, w1_i % M1)
            tx_seqs[i] = book.encode(combined)
            patterns[i] = book.pattern(combined)
        tx_seqs[0] = pc.erasure_book.encode(_sched_get(w0_sched, b))
        outputs = evaluate_block(topo, BlockInput(tuple(tx_seqs[k] for k in range(m))))
        rx = {k: outputs[k - 1] for k in range(1, m + 1)}

        collisions = 0
        for i in range(1, m - 1):
            collisions += sum(
                (not a.is_idle) and (not c.is_idle) for a, c in zip(tx_seqs[i], tx_seqs[i + 1])
            )
        # node 1 decodes the fresh source message on its listen slots
        try:
            belief_w0[1][b] = pc.erasure_book.decode(rx[1], patterns[1].slots)
        except DecodeError:
            trace.decode_failures += 1
            belief_w0[1][b] = 0
        # relay i+1 reconstructs node i's codeword from its listen slots
        for i in range(1, m - 1):
            listen = set(patterns[i + 1].listen_slots)
            recovered = tuple(
                rx[i + 1][t] if t in listen else IDLE for t in range(n)
            )
            try:
                combined = pc.relay_book(i, patterns.get(i + 1)).decode(recovered)
                w0_hat, w1_hat = pc.split(combined)
                belief_w0[i + 1][b - i] = w0_hat
                belief_w1[i + 1][b - i + 1] = w1_hat
            except DecodeError:
                trace.decode_failures += 1
        # sink decodes the last relay directly
        est = {}
        try:
            combined = pc.last_book.decode(rx[m])
            s0, s1 = pc.split(combined)
        except DecodeError:
            trace.decode_failures += 1
            s0 = s1 = None
        truth0 = _sched_get(w0_sched, b - (m - 1)) % M0
        truth1 = _sched_get(w1_sched, b - (m - 2)) % M1
        est["w0"] = {"block": b - (m - 1), "estimate": s0, "truth": truth0}
        est["w1"] = {"block": b - (m - 2), "estimate": s1, "truth": truth1}
        ok = s0 == truth0 and s1 == truth1
        trace.errors_w0 += s0 != truth0
        trace.errors_wk += s1 != truth1
        trace.collisions += collisions
        trace.blocks.append(
            BlockRecord(block=b, tx=dict(tx_seqs), rx=rx, estimates=est, correct=ok,
                        collisions=collisions)
        )
    return trace


def run_pipeline(
    topology: NetworkTopology,
    n: int,
    n_vec,
    num_msgs: tuple[int, int],
    blocks: int,
    seed: int,
    erasure_book: ErasureCodebook | None = None,
) -> PipelineTrace:
    """Simulate ``blocks`` blocks with fresh seeded uniform messages per
    block (warm-up messages before block 1 are fixed to 0)."""
    pc = PipelineCodec(topology, n, n_vec, num_msgs, erasure_book, seed=seed)
    rng = np.random.default_rng(seed)
    w0 = {b: int(rng.integers(pc.num_msgs[0])) for b in range(1, blocks + 1)}
    w1 = {b: int(rng.integers(pc.num_msgs[1])) for b in range(1, blocks + 1)}
    return simulate_blocks(pc, w0, w1, blocks)
