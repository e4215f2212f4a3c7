import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from bbg.errors import ParamInconsistency, RegimeRefused, RejectionBudgetExceeded
from bbg.oracle import enumerate_family
from bbg.sampler import (
    ChainConfig,
    default_burn_in,
    expected_acceptance,
    initial_graph,
    matrix_keys,
    run_chain,
    sample_many,
    sample_many_matrices,
    sample_rejection,
    sample_rejection_matrices,
    sample_uniform,
    switch_step,
)


def test_initial_graph_frozen():
    assert initial_graph((3, 3, 2, 2)).row_adj == ((0, 1), (0, 2), (1, 2))
    assert initial_graph((4, 6, 3, 2)).row_adj == ((0, 1, 2), (3, 4, 5), (0, 1, 2), (3, 4, 5))
    assert default_burn_in((3, 3, 2, 2)) == 216
    assert default_burn_in((200, 300, 3, 2)) == 76764


def test_seeded_outputs_frozen():
    assert sample_uniform((5, 5, 2, 2), ChainConfig(rng_seed=42)).key == (18, 12, 12, 3, 17)
    assert sample_rejection((5, 5, 2, 2), np.random.default_rng(42)).key == (17, 5, 10, 12, 18)


def test_chain_is_deterministic_in_seed():
    cfg = ChainConfig(rng_seed=9)
    assert sample_uniform((20, 30, 3, 2), cfg) == sample_uniform((20, 30, 3, 2), cfg)
    a = sample_many_matrices((4, 4, 2, 2), 10, cfg)
    assert (a == sample_many_matrices((4, 4, 2, 2), 10, cfg)).all()
    g, info = sample_uniform((4, 4, 2, 2), cfg, return_stats=True)
    assert info["rng"] == "PCG64" and info["burn_in"] == default_burn_in((4, 4, 2, 2))
    assert 0 < info["accept_fraction"] <= 1


def test_config_validation():
    with pytest.raises(ParamInconsistency):
        ChainConfig(burn_in_steps=0)
    with pytest.raises(ParamInconsistency):
        ChainConfig(proposal="Other")
    with pytest.raises(ParamInconsistency):
        ChainConfig(rng_seed=-1)


def test_rejection_regimes():
    with pytest.raises(RegimeRefused):
        sample_rejection_matrices((100, 100, 20, 20), 1, np.random.default_rng(0))
    with pytest.raises(RejectionBudgetExceeded):
        sample_rejection_matrices((5, 5, 3, 3), 50, np.random.default_rng(0), max_attempts=1)
    full = sample_rejection_matrices((3, 4, 4, 3), 2, np.random.default_rng(0))
    assert (full == 1).all()
    assert expected_acceptance((5, 5, 3, 3)) == pytest.approx(np.exp(-2))


@pytest.mark.parametrize("params", [(3, 3, 2, 2), (4, 4, 2, 2)])
def test_both_samplers_uniform(params):
    fam = enumerate_family(params)
    idx = fam.index
    count = 60 * len(fam)
    chain = np.bincount([idx[k] for k in matrix_keys(sample_many_matrices(params, count, ChainConfig(rng_seed=1)))],
                        minlength=len(fam))
    rej = np.bincount([idx[k] for k in matrix_keys(sample_rejection_matrices(params, count, np.random.default_rng(1)))],
                      minlength=len(fam))
    assert stats.chisquare(chain).pvalue > 1e-3
    assert stats.chisquare(rej).pvalue > 1e-3


def test_matrix_keys_match_graph_keys():
    gs = sample_many((4, 6, 3, 2), 5, ChainConfig(rng_seed=3))
    assert matrix_keys(np.stack([g.matrix for g in gs])) == [g.key for g in gs]
    wide = sample_uniform((1, 70, 70, 1))
    assert matrix_keys(wide.matrix[None]) == [wide.key]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(5, 5, 2, 2), (6, 9, 3, 2), (10, 20, 4, 2)]), st.integers(0, 2**32))
def test_steps_preserve_margins(params, seed):
    rng = np.random.default_rng(seed)
    g = initial_graph(params)
    for _ in range(20):
        g = switch_step(g, rng)
    h, frac = run_chain(g, 200, rng)
    n, m, d1, d2 = params
    for x in (g, h):
        assert (x.matrix.sum(1) == d1).all() and (x.matrix.sum(0) == d2).all()
    assert 0 <= frac <= 1
