import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbg.errors import AnchorPatternMismatch, IndexOutOfRange, InvalidSwitching
from bbg.graph_core import DegreeParams
from bbg.oracle import EdgeConstraint, enumerate_family
from bbg.sampler import ChainConfig, sample_uniform
from bbg.switching import (
    Kind,
    SwitchingTuple,
    anchor_kinds,
    apply_switching,
    count_bounds,
    count_switchings,
    find_switchings,
    inverse,
    is_valid,
)

ARITY = {k: ((3, 3) if not k.is_pair else (4, 3)) for k in Kind if k not in (Kind.TYPE3_FWD, Kind.TYPE3_BWD)}


def test_bounds_frozen():
    p = DegreeParams(5, 5, 2, 2)
    assert count_bounds(p, Kind.FORWARD) == (8, 24)
    assert count_bounds(p, Kind.BACKWARD) == (12, 36)
    assert count_bounds(p, Kind.TYPE1_FWD) == (4, 12)
    assert count_bounds(p, "Type2Bwd") == (12, 36)
    assert count_bounds(p, Kind.TYPE3_FWD) == (-96, 288)


def test_eight_cycle_counts(eight_cycle):
    g = eight_cycle
    assert count_switchings(g, (0, 2), Kind.FORWARD).value == 6
    assert count_switchings(g, (0, 0), Kind.BACKWARD).value == 6
    assert count_switchings(g, (0, 2, 0), Kind.TYPE1_FWD).value == 4
    assert count_switchings(g, (0, 1, 2), Kind.TYPE2_FWD).value == 2
    c = count_switchings(g, (0, 1, 1), Kind.TYPE3_BWD)
    assert (c.value, c.lower_bound, c.upper_bound, c.degenerate) == (8, 0, 128, True)
    first = find_switchings(g, (0, 2), Kind.FORWARD)[0]
    assert (first.left, first.right) == ((0, 1, 2), (2, 0, 3))


def test_anchor_errors(eight_cycle):
    with pytest.raises(AnchorPatternMismatch):
        find_switchings(eight_cycle, (0, 0), Kind.FORWARD)
    with pytest.raises(AnchorPatternMismatch):
        count_switchings(eight_cycle, (0, 0, 1), Kind.TYPE1_FWD)
    with pytest.raises(AnchorPatternMismatch):
        find_switchings(eight_cycle, (0, 0), Kind.TYPE3_FWD)
    with pytest.raises(IndexOutOfRange):
        find_switchings(eight_cycle, (0, 9), Kind.FORWARD)
    with pytest.raises(InvalidSwitching):
        SwitchingTuple(Kind.FORWARD, (0, 1), (2, 0, 3))
    with pytest.raises(InvalidSwitching):
        apply_switching(eight_cycle, SwitchingTuple(Kind.FORWARD, (0, 1, 2), (0, 1, 3)))


def _brute(g, anchor, kind):
    """Every tuple of the right shape fixed at ``anchor`` that passes ``is_valid``."""
    nl, nr = ARITY[kind]
    fixed = anchor[:-1]
    out = set()
    for L in itertools.product(range(g.n), repeat=nl - len(fixed)):
        for R in itertools.product(range(g.m), repeat=nr - 1):
            t = SwitchingTuple(kind, fixed + L, (anchor[-1],) + R)
            if is_valid(g, t):
                out.add(t)
    return out


@pytest.mark.parametrize("params", [(4, 4, 2, 2), (3, 6, 4, 2)])
def test_enumeration_matches_brute_force(params):
    g = enumerate_family(params)[1]
    anchors = [(0, v) for v in range(g.m)] + [(0, 1, v) for v in range(g.m)] + [(2, 0, v) for v in range(g.m)]
    checked = 0
    for anchor in anchors:
        for kind in anchor_kinds(g, anchor):
            if kind in ARITY:
                found = find_switchings(g, anchor, kind)
                assert len(set(found)) == len(found)
                assert set(found) == _brute(g, anchor, kind)
                checked += 1
    assert checked >= 10


def test_type3_count_matches_listing():
    for g in enumerate_family((4, 4, 2, 2))[:30]:
        for anchor in [(0, 1, 0), (1, 3, 2), (2, 0, 3)]:
            for kind in anchor_kinds(g, anchor):
                if kind in (Kind.TYPE3_FWD, Kind.TYPE3_BWD):
                    listed = find_switchings(g, anchor, kind)
                    assert count_switchings(g, anchor, kind).value == len(listed)
                    assert len(set(listed)) == len(listed)
                    assert all(is_valid(g, t) for t in listed)


def test_brackets_hold_on_four_by_four():
    fam = enumerate_family((4, 4, 2, 2))
    for g in fam[::7]:
        for anchor in [(1, 2), (0, 1, 3), (3, 2, 1)]:
            for kind in anchor_kinds(g, anchor):
                assert count_switchings(g, anchor, kind).within


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(5, 5, 2, 2), (6, 9, 3, 2), (8, 8, 3, 3)]), st.integers(0, 2**32), st.data())
def test_apply_then_inverse_roundtrips(params, seed, data):
    g = sample_uniform(params, ChainConfig(rng_seed=seed))
    n, m = g.n, g.m
    u1, u2 = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    v1 = data.draw(st.integers(0, m - 1))
    for anchor in [(u1, v1), (u1, u2, v1)]:
        for kind in anchor_kinds(g, anchor):
            ts = find_switchings(g, anchor, kind)
            if not ts:
                continue
            t = ts[data.draw(st.integers(0, len(ts) - 1))]
            h = apply_switching(g, t)
            assert h != g
            assert is_valid(h, inverse(t))
            assert apply_switching(h, inverse(t)) == g
            if kind.is_forward:
                want = EdgeConstraint.single(u1, v1) if len(anchor) == 2 else EdgeConstraint.pair(u1, u2, v1)
                assert want.satisfied_by(h)
            elif len(anchor) == 2:
                assert not h.has_edge(u1, v1)
