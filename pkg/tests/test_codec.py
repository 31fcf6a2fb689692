import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdline.codec import (
    AmbiguityError,
    DecodeError,
    ErasureCodebook,
    InfeasibleError,
    PipelineCodec,
    TxPattern,
    asymptotic_rate_target,
    build_adapted_codebook,
    build_last_relay_codebook,
    codebook_rate,
    erasure_failure_rate,
    run_pipeline,
    simulate_blocks,
)
from hdline.model import IDLE, NetworkTopology, tx


def test_pattern_validation():
    p = TxPattern(4, (3, 1))
    assert p.slots == (1, 3)
    assert p.listen_slots == (0, 2)
    with pytest.raises(InfeasibleError):
        TxPattern(4, (4,))
    with pytest.raises(InfeasibleError):
        TxPattern(4, (1, 1))


def test_last_relay_count_small():
    # 2 symbols in 4 slots over q=2: 2^2 * C(4,2) = 24
    book = build_last_relay_codebook(4, 2, 2)
    assert book.count == 24


def test_adapted_count_and_slots():
    parent = TxPattern(4, (0, 1))
    book = build_adapted_codebook(4, 1, 2, parent)
    assert book.count == 4
    # every codeword transmits only in the parent's listen slots {2, 3}
    for w in range(book.count):
        seq = book.encode(w)
        for t, s in enumerate(seq):
            assert s.is_idle or t in (2, 3)


def test_last_relay_requires_listening_slot():
    with pytest.raises(InfeasibleError):
        build_last_relay_codebook(4, 4, 2)
    build_last_relay_codebook(4, 0, 2)  # all idle is fine


def test_roundtrip_all_messages_small():
    book = build_last_relay_codebook(5, 2, 3)
    seen = set()
    for w in range(book.count):
        seq = book.encode(w)
        assert book.decode(seq) == w
        seen.add(seq)
    assert len(seen) == book.count  # all codewords distinct


def test_decode_rejects_garbage():
    book = build_adapted_codebook(4, 1, 2, TxPattern(4, (0,)))
    with pytest.raises(DecodeError):
        book.decode((tx(0), IDLE, IDLE, IDLE))  # transmit in a parent slot
    with pytest.raises(DecodeError):
        book.decode((IDLE, tx(0), tx(1), IDLE))  # wrong weight
    with pytest.raises(DecodeError):
        book.decode((IDLE, tx(0), IDLE))  # wrong length


def test_large_count_identity_without_materialization():
    n, n_tx, q = 16, 7, 3
    book = build_last_relay_codebook(n, n_tx, q)
    assert book.count == q**n_tx * math.comb(n, n_tx)
    rng = np.random.default_rng(0)
    for _ in range(200):
        w = int(rng.integers(book.count))
        assert book.decode(book.encode(w)) == w


def test_codebook_rate_value():
    assert codebook_rate(24, 4) == pytest.approx(1.1462406251802891, abs=1e-15)
    with pytest.raises(InfeasibleError):
        codebook_rate(0, 4)


def test_asymptotic_rate_values():
    assert asymptotic_rate_target(0.5, 0.5, 2) == pytest.approx(0.75, abs=1e-15)
    assert asymptotic_rate_target(0.0, 0.5, 1) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InfeasibleError):
        asymptotic_rate_target(1.5, 0.5, 2)


def test_rate_converges_to_target():
    tau, alpha, q = 0.5, 0.5, 2
    target = asymptotic_rate_target(tau, alpha, q)
    gaps = []
    for n in (16, 64, 256):
        n_next = round(tau * n)
        n_i = round(alpha * (n - n_next))
        count = q**n_i * math.comb(n - n_next, n_i)
        gaps.append(abs(codebook_rate(count, n) - target))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] < 0.02


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_pattern_codebook_roundtrip_property(data):
    n = data.draw(st.integers(2, 10))
    q = data.draw(st.integers(1, 3))
    parent_k = data.draw(st.integers(0, n - 1))
    parent = TxPattern(n, tuple(data.draw(st.permutations(range(n)))[:parent_k]))
    n_tx = data.draw(st.integers(0, n - parent_k))
    book = build_adapted_codebook(n, n_tx, q, parent)
    w = data.draw(st.integers(0, book.count - 1))
    seq = book.encode(w)
    assert book.decode(seq) == w
    # adjacent relays never transmit together
    assert all(seq[t].is_idle for t in parent.slots)


# ---------------------------------------------------------------------------
# erasure code


def test_erasure_trivial_decode():
    book = ErasureCodebook.random(8, 2, 4, seed=1)
    for w in range(4):
        assert book.decode(book.encode(w), erased_positions=()) == w


def test_erasure_all_erased_is_ambiguous():
    book = ErasureCodebook.random(8, 2, 4, seed=1)
    with pytest.raises(AmbiguityError):
        book.decode(book.encode(0), erased_positions=range(8))


def test_erasure_min_distance_pair_survives_any_single_slot():
    book = ErasureCodebook.with_min_distance(4, 1, 2, min_dist=4, seed=0)
    for w in range(2):
        sent = book.encode(w)
        for keep in range(4):
            erased = [t for t in range(4) if t != keep]
            assert book.decode(sent, erased) == w


def test_erasure_ambiguity_detected():
    # two identical codewords: any decode must raise, never guess
    rows = np.zeros((2, 4), dtype=np.int64)
    book = ErasureCodebook(4, 1, rows)
    with pytest.raises(AmbiguityError):
        book.decode(book.encode(0), erased_positions=())


def test_erasure_failure_rate_explicit_vs_analytic():
    # same ensemble statistics: both estimates should be in the same
    # ballpark for a small code where either path works
    args = dict(n=10, q=1, rate_bits=0.3, idle_prob=0.7, trials=4000, seed=7)
    explicit = erasure_failure_rate(**args, explicit=True)
    analytic = erasure_failure_rate(**args, explicit=False)
    assert abs(explicit - analytic) < 0.05


def test_erasure_failure_rate_monotone_in_rate():
    lo = erasure_failure_rate(32, 2, 0.2, 0.5, trials=2000, seed=3)
    hi = erasure_failure_rate(32, 2, 1.2, 0.5, trials=2000, seed=3)
    assert lo <= hi


def test_erasure_failure_rate_deterministic():
    a = erasure_failure_rate(128, 2, 0.6, 0.5, trials=500, seed=11)
    b = erasure_failure_rate(128, 2, 0.6, 0.5, trials=500, seed=11)
    assert a == b


# ---------------------------------------------------------------------------
# pipeline


def test_pipeline_codec_validation():
    topo = NetworkTopology.uniform(3, 2)
    with pytest.raises(InfeasibleError):
        PipelineCodec(topo, 4, (4, 2), (1, 1))  # relay 1 overflows listen slots
    with pytest.raises(InfeasibleError):
        PipelineCodec(topo, 4, (1, 1), (100, 100))  # too many messages
    with pytest.raises(InfeasibleError):
        PipelineCodec(NetworkTopology.uniform(3, 2, source_relay=2), 4, (1, 1), (1, 1))


def test_pipeline_m2_error_free():
    topo = NetworkTopology.uniform(2, 2)
    book = ErasureCodebook.with_min_distance(6, 2, 2, min_dist=6, seed=0)
    trace = run_pipeline(topo, 6, (2,), (2, 12), blocks=10, seed=4, erasure_book=book)
    assert trace.error_free
    assert trace.collisions == 0


def test_pipeline_m3_error_free():
    topo = NetworkTopology.uniform(3, 2)
    book = ErasureCodebook.with_min_distance(6, 2, 2, min_dist=6, seed=0)
    trace = run_pipeline(topo, 6, (2, 2), (2, 6), blocks=12, seed=9, erasure_book=book)
    assert trace.error_free
    assert trace.collisions == 0


def test_pipeline_delay_bookkeeping():
    # the sink's estimate for block b concerns w0 sent at b-(m-1)
    topo = NetworkTopology.uniform(3, 2)
    book = ErasureCodebook.with_min_distance(6, 2, 2, min_dist=6, seed=0)
    pc = PipelineCodec(topo, 6, (2, 2), (2, 6), erasure_book=book, seed=0)
    sched0 = {b: b % 2 for b in range(-3, 9)}
    sched1 = {b: b % 6 for b in range(-3, 9)}
    trace = simulate_blocks(pc, sched0, sched1, 8)
    assert trace.error_free
    for rec in trace.blocks:
        assert rec.estimates["w0"]["block"] == rec.block - 2
        assert rec.estimates["w1"]["block"] == rec.block - 1
