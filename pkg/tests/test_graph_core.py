import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbg import BiregularGraph, DegreeParams, build_graph, deserialize, from_matrix, serialize
from bbg.errors import (
    DegreeViolation,
    DuplicateEdge,
    IndexOutOfRange,
    ParamInconsistency,
    ParseError,
)
from bbg.graph_core import (
    adjacency_matrix,
    codegree,
    codegree_matrix,
    deserialize_many,
    serialize_many,
)
from bbg.sampler import initial_graph, sample_uniform, ChainConfig


def test_params_validation():
    assert DegreeParams(6, 9, 3, 2).num_edges == 18
    with pytest.raises(ParamInconsistency):
        DegreeParams(3, 3, 2, 1)
    with pytest.raises(ParamInconsistency):
        DegreeParams(2, 1, 1, 2)  # d2 > d1
    with pytest.raises(ParamInconsistency):
        DegreeParams(2.0, 2, 1, 1)
    with pytest.raises(ParamInconsistency):
        DegreeParams(True, 1, 1, 1)


def test_eight_cycle_queries(eight_cycle):
    g = eight_cycle
    assert g.neighbors(0) == (0, 1)
    assert g.col_neighbors(0) == (0, 3)
    assert g.has_edge(3, 0) and not g.has_edge(0, 2)
    assert len(g.edges()) == 8
    # column 0 is the most significant bit
    assert g.key == (0b1100, 0b0110, 0b0011, 0b1001)
    assert codegree(g, 0, 1) == 1 and codegree(g, 0, 2) == 0 and codegree(g, 2, 2) == 2
    M = codegree_matrix(g)
    assert M.trace() == 0 and M[0, 1] == 1 and M[0, 2] == 0
    A = adjacency_matrix(g)
    assert A.shape == (8, 8) and (A == A.T).all() and A.sum() == 16


def test_build_errors():
    with pytest.raises(IndexOutOfRange):
        build_graph((2, 2, 1, 1), [(0, 0), (1, 2)])
    with pytest.raises(DuplicateEdge):
        build_graph((2, 2, 1, 1), [(0, 0), (0, 0)])
    with pytest.raises(DegreeViolation):
        build_graph((2, 2, 1, 1), [(0, 0), (1, 0)])
    with pytest.raises(DegreeViolation):
        from_matrix([[1, 2], [0, 1]])


def test_matrix_is_read_only(eight_cycle):
    with pytest.raises(ValueError):
        eight_cycle.matrix[0, 0] = 0


def test_bbg1_exact_text(eight_cycle):
    text = serialize(eight_cycle)
    assert text == "BBG1 4 4 2 2\n0: 0 1\n1: 1 2\n2: 2 3\n3: 0 3\n"
    assert deserialize(text) == eight_cycle
    assert deserialize(text.rstrip("\n")) == eight_cycle


@pytest.mark.parametrize("text, exc, line", [
    ("", ParseError, 1),
    ("BBG 2 2 1 1\n0: 0\n1: 1\n", ParseError, 1),
    ("BBG1 2 2 1 1\n0: 0\n", ParseError, 1),
    ("BBG1 2 2 1 1\n0: 0\n2: 1\n", ParseError, 3),
    ("BBG1 2 2 1 1\n0: 0\n1:x1\n", ParseError, 3),
    ("BBG1 2 2 2 2\n0: 1 0\n1: 0 1\n", ParseError, 2),
])
def test_parse_errors_carry_line(text, exc, line):
    with pytest.raises(exc) as info:
        deserialize(text)
    assert info.value.line == line


def test_parse_semantic_errors():
    with pytest.raises(DuplicateEdge):
        deserialize("BBG1 2 2 2 2\n0: 0 0\n1: 0 1\n")
    with pytest.raises(IndexOutOfRange):
        deserialize("BBG1 2 2 1 1\n0: 2\n1: 0\n")
    with pytest.raises(DegreeViolation):
        deserialize("BBG1 2 2 1 1\n0: 0\n1: 0\n")
    with pytest.raises(ParamInconsistency):
        deserialize("BBG1 3 3 2 1\n0: 0 1\n1: 1 2\n2: 0 2\n")


def test_many_roundtrip():
    gs = [initial_graph((3, 3, 2, 2)), initial_graph((4, 6, 3, 2))]
    text = serialize_many(gs)
    assert "\n\nBBG1 4 6 3 2" in text
    assert deserialize_many(text) == gs


params_strategy = st.sampled_from([(3, 3, 2, 2), (4, 6, 3, 2), (6, 9, 3, 2), (5, 10, 4, 2), (7, 7, 3, 3)])


@settings(max_examples=40, deadline=None)
@given(params_strategy, st.integers(0, 2**32))
def test_roundtrip_and_margins(params, seed):
    g = sample_uniform(params, ChainConfig(burn_in_steps=50, rng_seed=seed))
    assert deserialize(serialize(g)) == g
    assert from_matrix(g.matrix) == g
    X = g.matrix
    n, m, d1, d2 = params
    assert (X.sum(1) == d1).all() and (X.sum(0) == d2).all()
    M = codegree_matrix(g)
    assert (M == M.T).all() and M.sum() == m * d2 * (d2 - 1)
    assert isinstance(g, BiregularGraph) and hash(g) == hash(from_matrix(X))
