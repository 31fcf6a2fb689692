import math

import numpy as np
import pytest

from hdline import oracle
from hdline.codec import ErasureCodebook, PipelineCodec
from hdline.model import NetworkTopology
from hdline.regions import ChainDistributionT1

LOG2_3 = math.log2(3.0)


def test_materialize_t1_uniform():
    d = ChainDistributionT1(np.full(3, 1 / 3), np.full(3, 1 / 3))
    table = oracle.materialize_joint(d)
    assert table.sizes == (3, 3)
    assert all(p == pytest.approx(1 / 9, abs=1e-15) for p in table.probs)


def test_materialized_marginals_match_chain():
    rng = np.random.default_rng(2)
    link = np.vstack([rng.dirichlet(np.ones(3)) for _ in range(3)])
    d = ChainDistributionT1(rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3)), (link,))
    table = oracle.materialize_joint(d)
    pair = np.array(table.marginal(("X1", "X2")).as_matrix())
    direct = d.p_x1[:, None] * link
    assert np.max(np.abs(pair - direct)) < 1e-12
    m0 = table.marginal(("X0",))
    assert np.max(np.abs(np.array(m0.probs) - d.p_x0)) < 1e-12


def test_table_cap_enforced():
    with pytest.raises(oracle.BudgetExceededError):
        oracle.JointTable(("A", "B"), (100000, 1000), (0.0,) * 3)


def test_exact_count_values():
    assert oracle.exact_count(4, [2, 2], [2, 2]) == [4, 24]
    # 4 symbols over q=3 placed into 12-4=8 free slots: 3^4 * C(8,4) = 5670
    assert oracle.exact_count(12, [4, 4], [3, 3]) == [5670, 3**4 * math.comb(12, 4)]
    with pytest.raises(oracle.InfeasibleConfigError):
        oracle.exact_count(4, [2, 4], [2, 2])


def test_exact_count_matches_codec():
    topo = NetworkTopology.uniform(3, 2)
    pc = PipelineCodec(topo, 6, (2, 2), (1, 1))
    counts = oracle.exact_count(6, [2, 2], [2, 2])
    assert [pc.book_count(1), pc.book_count(2)] == counts


def test_exhaustive_decode_check_passes():
    topo = NetworkTopology.uniform(3, 2)
    book = ErasureCodebook.with_min_distance(5, 2, 2, min_dist=5, seed=0)
    pc = PipelineCodec(topo, 5, (2, 2), (2, 4), erasure_book=book)
    passed, counterexample = oracle.exhaustive_decode_check(pc)
    assert passed and counterexample is None


def test_exhaustive_decode_check_catches_corruption():
    topo = NetworkTopology.uniform(2, 2)
    book = ErasureCodebook.with_min_distance(5, 2, 2, min_dist=5, seed=0)
    pc = PipelineCodec(topo, 5, (2,), (2, 4), erasure_book=book)

    class SwappedBook:
        def __init__(self, inner):
            self._inner = inner
            self.count = inner.count

        def encode(self, w):
            return self._inner.encode({1: 0, 0: 1}.get(w, w))

        def pattern(self, w):
            return self._inner.pattern({1: 0, 0: 1}.get(w, w))

        def decode(self, seq):
            return self._inner.decode(seq)

    pc.last_book = SwappedBook(pc.last_book)
    passed, counterexample = oracle.exhaustive_decode_check(pc)
    assert not passed
    assert counterexample is not None


def test_fine_grid_scan_corners():
    reg = oracle.fine_grid_example_scan(101)
    assert reg.rk_at(0.0) == pytest.approx(LOG2_3, abs=1e-9)
    assert reg.r0_max == pytest.approx(oracle.example_axis_intercept(), abs=1e-12)
    with pytest.raises(ValueError):
        oracle.fine_grid_example_scan(5)


def test_fine_grid_scan_containment():
    coarse = oracle.fine_grid_example_scan(11)
    fine = oracle.fine_grid_example_scan(101)
    for x in np.linspace(0.0, coarse.r0_max, 41):
        assert fine.rk_at(x) >= coarse.rk_at(x) - 1e-9


def test_example_numeric_landmarks():
    best_sum, p = oracle.example_max_sum_numeric()
    assert best_sum == pytest.approx(LOG2_3, abs=1e-12)
    assert p == pytest.approx(1 / 3, abs=1e-6)
    assert oracle.example_axis_intercept() == pytest.approx(1.1389, abs=2e-4)
