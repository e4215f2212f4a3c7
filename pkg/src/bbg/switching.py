"""Degree-preserving switchings that force or remove edges at an anchor.

Eight kinds are supported. ``Forward``/``Backward`` act on an anchor ``(u1, v1)``
and rewire six vertices. ``Type1``/``Type2``/``Type3`` act on an anchor
``(u1, u2, v1)`` and make both ``u1 v1`` and ``u2 v1`` edges (forward) or undo
that (backward).

Every kind is described by three cell sets on the *source* graph: cells that
must be edges and are removed, cells that must be non-edges and are added, and
cells that must be edges and are left alone. A tuple is valid when the pattern
holds and the toggled cells are pairwise distinct; degree preservation then
follows because each vertex label occurs equally often among removed and added
cells.

Structurally, Type 1 is a forward switching at ``(u2, v1)`` that does not touch
``(u1, v1)``; Type 2 is a forward switching at ``(u1, v1)`` that does not touch
``(u2, v1)``; Type 3 is a forward switching at ``(u2, v1)`` composed with one at
``(u1, v1)``, the two being cell-disjoint. Enumeration follows that structure,
visiting candidates in the order ``a2 in N(b1), b2 in N(a1), a3 not in N(b2),
b3 in N(a3)`` (forward) and ``a2 not in N(b1), b3 in N(a2), a3 not in N(b3),
b2 in N(a3)`` (backward), each filtered by one residual adjacency test.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import AnchorPatternMismatch, IndexOutOfRange, InvalidSwitching
from .graph_core import BiregularGraph, DegreeParams, _from_row_sets

__all__ = [
    "Kind",
    "SwitchingTuple",
    "SwitchingCount",
    "find_switchings",
    "count_switchings",
    "apply_switching",
    "is_valid",
    "count_bounds",
    "inverse",
]


class Kind(str, Enum):
    FORWARD = "Forward"
    BACKWARD = "Backward"
    TYPE1_FWD = "Type1Fwd"
    TYPE1_BWD = "Type1Bwd"
    TYPE2_FWD = "Type2Fwd"
    TYPE2_BWD = "Type2Bwd"
    TYPE3_FWD = "Type3Fwd"
    TYPE3_BWD = "Type3Bwd"

    @property
    def is_pair(self) -> bool:
        return self not in (Kind.FORWARD, Kind.BACKWARD)

    @property
    def is_forward(self) -> bool:
        return self in (Kind.FORWARD, Kind.TYPE1_FWD, Kind.TYPE2_FWD, Kind.TYPE3_FWD)


_INVERSE = {
    Kind.FORWARD: Kind.BACKWARD,
    Kind.TYPE1_FWD: Kind.TYPE1_BWD,
    Kind.TYPE2_FWD: Kind.TYPE2_BWD,
    Kind.TYPE3_FWD: Kind.TYPE3_BWD,
}
_INVERSE.update({v: k for k, v in list(_INVERSE.items())})

_ARITY = {
    Kind.FORWARD: (3, 3),
    Kind.BACKWARD: (3, 3),
    Kind.TYPE1_FWD: (4, 3),
    Kind.TYPE1_BWD: (4, 3),
    Kind.TYPE2_FWD: (4, 3),
    Kind.TYPE2_BWD: (4, 3),
    Kind.TYPE3_FWD: (6, 5),
    Kind.TYPE3_BWD: (6, 5),
}

# Required (X[u1 v1], X[u2 v1]) for pair kinds, X[u1 v1] for single kinds.
_ANCHOR_PATTERN = {
    Kind.FORWARD: (0,),
    Kind.BACKWARD: (1,),
    Kind.TYPE1_FWD: (1, 0),
    Kind.TYPE2_FWD: (0, 1),
    Kind.TYPE3_FWD: (0, 0),
    Kind.TYPE1_BWD: (1, 1),
    Kind.TYPE2_BWD: (1, 1),
    Kind.TYPE3_BWD: (1, 1),
}


@dataclass(frozen=True)
class SwitchingTuple:
    kind: Kind
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "left", tuple(int(u) for u in self.left))
        object.__setattr__(self, "right", tuple(int(v) for v in self.right))
        if (len(self.left), len(self.right)) != _ARITY[self.kind]:
            raise InvalidSwitching(
                f"{self.kind.value} needs {_ARITY[self.kind]} left/right vertices, "
                f"got ({len(self.left)}, {len(self.right)})"
            )

    @property
    def anchor(self) -> tuple[int, ...]:
        if self.kind.is_pair:
            return (self.left[0], self.left[1], self.right[0])
        return (self.left[0], self.right[0])

    def cells(self):
        """``(removed, added, kept)`` cell lists on the source graph."""
        return _cells(self.kind, self.left, self.right)


def _cells(kind: Kind, L, R):
    if kind in (Kind.FORWARD, Kind.BACKWARD):
        u1, u2, u3 = L
        v1, v2, v3 = R
        ones = [(u1, v2), (u2, v1), (u3, v3)]
        zeros = [(u1, v1), (u2, v3), (u3, v2)]
        keep = []
    elif kind in (Kind.TYPE1_FWD, Kind.TYPE1_BWD):
        u1, u2, u3, u4 = L
        v1, v2, v3 = R
        ones = [(u2, v2), (u3, v1), (u4, v3)]
        zeros = [(u2, v1), (u3, v3), (u4, v2)]
        keep = [(u1, v1)]
    elif kind in (Kind.TYPE2_FWD, Kind.TYPE2_BWD):
        u1, u2, u3, u4 = L
        v1, v2, v3 = R
        ones = [(u1, v2), (u3, v1), (u4, v3)]
        zeros = [(u1, v1), (u3, v3), (u4, v2)]
        keep = [(u2, v1)]
    else:
        u1, u2, u3, u4, u5, u6 = L
        v1, v2, v3, v4, v5 = R
        ones = [(u1, v4), (u2, v2), (u3, v1), (u4, v3), (u5, v1), (u6, v5)]
        zeros = [(u1, v1), (u2, v1), (u3, v3), (u4, v2), (u5, v5), (u6, v4)]
        keep = []
    if kind.is_forward:
        return ones, zeros, keep
    return zeros, ones, keep


@dataclass(frozen=True)
class SwitchingCount:
    value: int
    lower_bound: int
    upper_bound: int
    degenerate: bool = False

    @property
    def within(self) -> bool:
        return self.lower_bound <= self.value <= self.upper_bound


def count_bounds(params: DegreeParams, kind) -> tuple[int, int]:
    """Raw (possibly negative) lower and upper bounds on the number of valid switchings."""
    kind = Kind(kind)
    n, d1, d2 = params.n, params.d1, params.d2
    if kind is Kind.FORWARD:
        return d1**2 * d2 * (n - 2 * d2), d1**2 * d2 * (n - d2)
    if kind in (Kind.BACKWARD, Kind.TYPE1_BWD, Kind.TYPE2_BWD):
        return d1**2 * (n - d2) * (n - 2 * d2), d1**2 * (n - d2) ** 2
    if kind in (Kind.TYPE1_FWD, Kind.TYPE2_FWD):
        return d1**2 * (d2 - 1) * (n - 2 * d2), d1**2 * (d2 - 1) * (n - d2)
    if kind is Kind.TYPE3_FWD:
        base = d1**4 * d2 * (d2 - 1) * (n - d2)
        return base * (n - 3 * d2), base * (n - d2)
    base = d1**4 * (n - d2) ** 2 * (n - d2 - 1)
    return base * (n - 3 * d2), base * (n - d2)


def inverse(t: SwitchingTuple) -> SwitchingTuple:
    """The tuple that undoes ``t`` when applied to its result."""
    return SwitchingTuple(_INVERSE[t.kind], t.left, t.right)


# --- validity and application -------------------------------------------------


def is_valid(g: BiregularGraph, t: SwitchingTuple) -> bool:
    n, m = g.n, g.m
    if any(not 0 <= u < n for u in t.left) or any(not 0 <= v < m for v in t.right):
        return False
    if t.kind.is_pair:
        if t.left[0] == t.left[1]:
            return False
    else:
        if len(set(t.left)) != 3 or len(set(t.right)) != 3:
            return False
    if tuple(int(g.has_edge(u, t.right[0])) for u in t.anchor[:-1]) != _ANCHOR_PATTERN[t.kind]:
        return False
    removed, added, kept = t.cells()
    if len(set(removed)) != len(removed) or len(set(added)) != len(added):
        return False
    if not all(g.has_edge(u, v) for u, v in removed):
        return False
    if any(g.has_edge(u, v) for u, v in added):
        return False
    touched = set(removed) | set(added)
    return all(g.has_edge(u, v) and (u, v) not in touched for u, v in kept)


def apply_switching(g: BiregularGraph, t: SwitchingTuple) -> BiregularGraph:
    """Return a new graph with the switching applied; raises InvalidSwitching."""
    if not is_valid(g, t):
        raise InvalidSwitching(f"{t} is not a valid switching for {g!r}")
    removed, added, _ = t.cells()
    rows = [set(r) for r in g.row_adj]
    for u, v in removed:
        rows[u].discard(v)
    for u, v in added:
        rows[u].add(v)
    return _from_row_sets(g.params, rows)


# --- enumeration ----------------------------------------------------------------


class _Adj:
    """Neighbourhood lookups with cached complements."""

    def __init__(self, g: BiregularGraph):
        self.g = g
        self.rows = g.row_adj
        self.cols = g.col_adj
        self.row_sets = [frozenset(r) for r in g.row_adj]
        self._col_comp = {}

    def edge(self, u, v) -> bool:
        return v in self.row_sets[u]

    def col_complement(self, v):
        comp = self._col_comp.get(v)
        if comp is None:
            inside = set(self.cols[v])
            comp = tuple(u for u in range(self.g.n) if u not in inside)
            self._col_comp[v] = comp
        return comp


def _fwd(adj: _Adj, a1: int, b1: int) -> Iterator[tuple[int, int, int, int]]:
    # forward at (a1, b1): yields (a2, a3, b2, b3); requires X[a1 b1] = 0
    for a2 in adj.cols[b1]:
        for b2 in adj.rows[a1]:
            for a3 in adj.col_complement(b2):
                for b3 in adj.rows[a3]:
                    if not adj.edge(a2, b3):
                        yield a2, a3, b2, b3


def _bwd(adj: _Adj, a1: int, b1: int) -> Iterator[tuple[int, int, int, int]]:
    # backward at (a1, b1): yields (a2, a3, b2, b3); requires X[a1 b1] = 1
    for a2 in adj.col_complement(b1):
        for b3 in adj.rows[a2]:
            for a3 in adj.col_complement(b3):
                for b2 in adj.rows[a3]:
                    if not adj.edge(a1, b2):
                        yield a2, a3, b2, b3


def _six_cells(a1, b1, a2, a3, b2, b3, m):
    # (ones, zeros) of a forward switching at (a1, b1); backward swaps the roles
    ones = (a1 * m + b2, a2 * m + b1, a3 * m + b3)
    zeros = (a1 * m + b1, a2 * m + b3, a3 * m + b2)
    return ones, zeros


def _iter_raw(g: BiregularGraph, anchor, kind: Kind):
    adj = _Adj(g)
    m = g.m
    if kind is Kind.FORWARD:
        u1, v1 = anchor
        for u2, u3, v2, v3 in _fwd(adj, u1, v1):
            yield (u1, u2, u3), (v1, v2, v3)
    elif kind is Kind.BACKWARD:
        u1, v1 = anchor
        for u2, u3, v2, v3 in _bwd(adj, u1, v1):
            yield (u1, u2, u3), (v1, v2, v3)
    elif kind in (Kind.TYPE1_FWD, Kind.TYPE1_BWD):
        u1, u2, v1 = anchor
        gen = _fwd if kind is Kind.TYPE1_FWD else _bwd
        for u3, u4, v2, v3 in gen(adj, u2, v1):
            if u3 != u1:
                yield (u1, u2, u3, u4), (v1, v2, v3)
    elif kind in (Kind.TYPE2_FWD, Kind.TYPE2_BWD):
        u1, u2, v1 = anchor
        gen = _fwd if kind is Kind.TYPE2_FWD else _bwd
        for u3, u4, v2, v3 in gen(adj, u1, v1):
            if u3 != u2:
                yield (u1, u2, u3, u4), (v1, v2, v3)
    else:
        u1, u2, v1 = anchor
        gen = _fwd if kind is Kind.TYPE3_FWD else _bwd
        part_b = []
        for u5, u6, v4, v5 in gen(adj, u1, v1):
            ones, zeros = _six_cells(u1, v1, u5, u6, v4, v5, m)
            part_b.append(((u5, u6, v4, v5), frozenset(ones), frozenset(zeros)))
        for u3, u4, v2, v3 in gen(adj, u2, v1):
            a_ones, a_zeros = _six_cells(u2, v1, u3, u4, v2, v3, m)
            for (u5, u6, v4, v5), b_ones, b_zeros in part_b:
                if b_ones.isdisjoint(a_ones) and b_zeros.isdisjoint(a_zeros):
                    yield (u1, u2, u3, u4, u5, u6), (v1, v2, v3, v4, v5)


def _count_type3(g: BiregularGraph, anchor, kind: Kind) -> int:
    # |A| * |B| minus the pairs sharing a toggled cell, without listing the products
    adj = _Adj(g)
    m = g.m
    u1, u2, v1 = anchor
    gen = _fwd if kind is Kind.TYPE3_FWD else _bwd
    by_one: dict[int, list[int]] = {}
    by_zero: dict[int, list[int]] = {}
    size_b = 0
    for k, (u5, u6, v4, v5) in enumerate(gen(adj, u1, v1)):
        ones, zeros = _six_cells(u1, v1, u5, u6, v4, v5, m)
        for c in ones:
            by_one.setdefault(c, []).append(k)
        for c in zeros:
            by_zero.setdefault(c, []).append(k)
        size_b += 1
    total = 0
    for u3, u4, v2, v3 in gen(adj, u2, v1):
        ones, zeros = _six_cells(u2, v1, u3, u4, v2, v3, m)
        clash = set()
        for c in ones:
            clash.update(by_one.get(c, ()))
        for c in zeros:
            clash.update(by_zero.get(c, ()))
        total += size_b - len(clash)
    return total


def _check_anchor(g: BiregularGraph, anchor, kind: Kind):
    anchor = tuple(int(a) for a in anchor)
    expected = 3 if kind.is_pair else 2
    if len(anchor) != expected:
        raise AnchorPatternMismatch(f"{kind.value} needs an anchor of length {expected}, got {anchor}")
    *lefts, v1 = anchor
    if any(not 0 <= u < g.n for u in lefts) or not 0 <= v1 < g.m:
        raise IndexOutOfRange(f"anchor {anchor} out of range for {g!r}")
    if kind.is_pair and lefts[0] == lefts[1]:
        raise AnchorPatternMismatch("pair anchors need u1 != u2")
    pattern = tuple(int(g.has_edge(u, v1)) for u in lefts)
    if pattern != _ANCHOR_PATTERN[kind]:
        raise AnchorPatternMismatch(
            f"{kind.value} needs anchor edge pattern {_ANCHOR_PATTERN[kind]}, found {pattern}"
        )
    return anchor


def find_switchings(g: BiregularGraph, anchor, kind) -> list[SwitchingTuple]:
    """All valid switchings of ``kind`` at ``anchor``, in constructive order."""
    kind = Kind(kind)
    anchor = _check_anchor(g, anchor, kind)
    return [SwitchingTuple(kind, L, R) for L, R in _iter_raw(g, anchor, kind)]


def count_switchings(g: BiregularGraph, anchor, kind) -> SwitchingCount:
    """Number of valid switchings with the matching bracket (negative lower bounds clamped)."""
    kind = Kind(kind)
    anchor = _check_anchor(g, anchor, kind)
    if kind in (Kind.TYPE3_FWD, Kind.TYPE3_BWD):
        value = _count_type3(g, anchor, kind)
    else:
        value = sum(1 for _ in _iter_raw(g, anchor, kind))
    lo, hi = count_bounds(g.params, kind)
    return SwitchingCount(value, max(lo, 0), hi, degenerate=lo < 0)


def anchor_kinds(g: BiregularGraph, anchor) -> list[Kind]:
    """Kinds whose anchor pattern matches ``g`` at ``anchor``."""
    anchor = tuple(anchor)
    if len(anchor) == 2:
        return [Kind.BACKWARD] if g.has_edge(*anchor) else [Kind.FORWARD]
    u1, u2, v1 = anchor
    pattern = (int(g.has_edge(u1, v1)), int(g.has_edge(u2, v1)))
    return [k for k in Kind if k.is_pair and _ANCHOR_PATTERN[k] == pattern]
