import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbg.discrepancy import (
    DiscrepancyParams,
    dp_check,
    dp_params,
    edge_count,
    heavy_sum,
    source_matrix,
)
from bbg.errors import CapExceeded, DomainError, EmptySubset, IndexOutOfRange
from bbg.graph_core import DegreeParams
from bbg.oracle import enumerate_family
from bbg.sampler import ChainConfig, sample_uniform


def test_constants_frozen():
    dp = dp_params(DegreeParams(3, 3, 2, 2))
    assert (dp.delta, dp.kappa2, dp.pop) == (pytest.approx(2 / 3), 270.0, 3)
    assert dp.kappa1 == pytest.approx(math.e**2 * 9)
    assert dp.alpha0 == pytest.approx(19517.956624582435, rel=1e-12)
    dm = dp_params(DegreeParams(50, 75, 3, 2), mode="M")
    assert dm.delta == pytest.approx(3 / 49) and dm.pop == 50
    assert dm.kappa1 == pytest.approx(math.e**2 * (1 + 4 / 46) ** 2)
    with pytest.raises(DomainError):
        dp_params(DegreeParams(2, 3, 3, 2))
    with pytest.raises(DomainError):
        dp_params(DegreeParams(4, 4, 2, 2), mode="M")
    with pytest.raises(DomainError):
        dp_params(DegreeParams(4, 4, 2, 2), mode="Z")


def test_edge_count_and_errors(eight_cycle):
    A = source_matrix(eight_cycle)
    assert edge_count(A, {0, 1}, {1}) == 2
    assert edge_count(A, range(4), range(4)) == 8
    M = source_matrix(eight_cycle, "M")
    assert M.trace() == 0 and edge_count(M, {0}, {1, 3}) == 2
    with pytest.raises(EmptySubset):
        edge_count(A, [], [0])
    with pytest.raises(IndexOutOfRange):
        edge_count(A, [0], [4])


def test_whole_small_family_passes():
    fam = enumerate_family((3, 3, 2, 2))
    dp = dp_params(fam.params)
    assert all(dp_check(source_matrix(g), dp)[0] for g in fam)


def _subsets(k):
    for mask in range(1, 1 << k):
        yield [i for i in range(k) if mask >> i & 1]


def _brute_first_failure(A, dp):
    for S in _subsets(A.shape[0]):
        for T in _subsets(A.shape[1]):
            e = int(A[np.ix_(S, T)].sum())
            base = dp.delta * len(S) * len(T)
            s = max(len(S), len(T))
            ok1 = e <= dp.kappa1 * base
            ok2 = e <= base or e * math.log(e / base) <= dp.kappa2 * s * math.log(math.e * dp.pop / s)
            if not (ok1 or ok2):
                return tuple(S), tuple(T)
    return None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.2, 3.0), st.floats(0.01, 0.5))
def test_exhaustive_matches_brute_force(seed, kappa1, kappa2):
    g = sample_uniform((5, 5, 2, 2), ChainConfig(rng_seed=seed))
    dp = DiscrepancyParams("X", 0.4, kappa1, kappa2, 1.0, 1.0, 5)
    A = source_matrix(g)
    holds, wit = dp_check(A, dp)
    want = _brute_first_failure(A, dp)
    assert holds == (want is None)
    if wit is not None:
        assert (wit.S, wit.T) == want
        assert not wit.case1_ok and not wit.case2_ok
        assert wit.e_value == edge_count(A, wit.S, wit.T)


def test_sampled_strategy_finds_gross_failure():
    g = sample_uniform((10, 10, 3, 3), ChainConfig(rng_seed=0))
    dp = DiscrepancyParams("X", 0.3, 0.01, 0.001, 1.0, 1.0, 10)
    holds, wit = dp_check(source_matrix(g), dp, "sampled", trials=100, rng=np.random.default_rng(0))
    assert not holds and '"e_value"' in wit.to_json()


def test_caps_and_strategy():
    g = sample_uniform((15, 15, 2, 2), ChainConfig(rng_seed=0))
    with pytest.raises(CapExceeded):
        dp_check(source_matrix(g), dp_params(g.params))
    with pytest.raises(CapExceeded):
        dp_check(source_matrix(g, "M"), dp_params(g.params, mode="M"))
    with pytest.raises(DomainError):
        dp_check(source_matrix(g), dp_params(g.params), "greedy")
    with pytest.raises(DomainError):
        source_matrix(g, "Y")


def test_heavy_sum_both_modes():
    g = sample_uniform((50, 75, 3, 2), ChainConfig(rng_seed=5))
    rng = np.random.default_rng(5)
    x = rng.standard_normal(50)
    x /= np.linalg.norm(x)
    y = rng.standard_normal(75)
    y -= y.mean()
    y /= np.linalg.norm(y)
    v, ok = heavy_sum(g, x, y, dp_params(g.params))
    assert ok and abs(v) < 10
    xm = x - x.mean()
    xm /= np.linalg.norm(xm)
    v, ok = heavy_sum(g, xm, None, dp_params(g.params, mode="M"))
    assert ok
    # all couples heavy on a spike: the heavy sum is the full bilinear form
    e = np.zeros(50)
    e[0] = 1.0
    f = np.zeros(75)
    f[list(g.neighbors(0))[:1]] = 1 / math.sqrt(2)
    f[[v for v in range(75) if not g.has_edge(0, v)][0]] = -1 / math.sqrt(2)
    v, _ = heavy_sum(g, e, f, dp_params(g.params))
    assert v == pytest.approx(1 / math.sqrt(2))


def test_first_witness_is_canonical(eight_cycle):
    dp = DiscrepancyParams("X", 0.4, 0.2, 0.01, 1.0, 1.0, 4)
    holds, wit = dp_check(source_matrix(eight_cycle), dp)
    assert not holds and (wit.S, wit.T, wit.e_value) == ((0,), (0,), 1)
