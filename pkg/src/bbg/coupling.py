"""Weighted meta-graphs between a family and an edge-constrained subfamily.

The meta-graph has the family on its left and the subfamily (graphs containing
the anchor edge, or both anchor edges in pair mode) on its right. Edges come
from switchings, plus identity edges for graphs already in the subfamily.
Completion pads the weights so both sides become exactly regular; a uniform
left vertex followed by a weight-proportional step then lands on a uniform
right vertex, which is the coupling used for concentration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import AnchorPatternMismatch, CompletionImpossible, NoValidSwitching
from .graph_core import BiregularGraph, DegreeParams, _from_row_sets
from .oracle import (
    DEFAULT_MEMBER_CAP,
    EdgeConstraint,
    GraphFamily,
    check_margins,
    enumerate_family,
)
from .switching import (
    Kind,
    SwitchingTuple,
    _Adj,
    _iter_raw,
    anchor_kinds,
    count_switchings,
)

__all__ = [
    "MetaWeights",
    "meta_weights",
    "MetaGraph",
    "build_meta_graph",
    "complete_meta_graph",
    "CoupledStepOutcome",
    "coupled_step",
    "coupled_steps",
    "in_b_lower_bounds",
    "dump_edges",
]


@dataclass(frozen=True)
class MetaWeights:
    switch: int  # weight of a forward (single) or Type 1/2 (pair) edge
    switch3: int  # weight of a Type 3 edge (pair only)
    identity: int
    left_target: int
    right_target: int


def meta_weights(params: DegreeParams, pair_mode: bool) -> MetaWeights:
    n, d1, d2 = params.n, params.d1, params.d2
    if not pair_mode:
        w = d1**2 * d2 * (n - d2)
        return MetaWeights(1, 0, w, w, d1**2 * n * (n - d2))
    w12 = d1**2 * d2 * (n - d2)
    wid = d1**4 * d2 * (d2 - 1) * (n - d2) ** 2
    return MetaWeights(w12, 1, wid, wid, d1**4 * (n - d2) ** 2 * n * (n - 1))


def in_b_lower_bounds(params: DegreeParams, pair_mode: bool) -> tuple[float, float]:
    """Lower bounds on P(step uses a genuine edge | target) and (| source)."""
    n, m, d1, d2 = params.as_tuple()
    if pair_mode:
        return 1 - 2 * d2 / n, 1 - 2 * d2 / (n - d2)
    return 1 - d1 / m, 1 - d1 / (m - d1) if m > d1 else float("-inf")


@dataclass(frozen=True)
class MetaGraph:
    left_family: GraphFamily
    right_family: GraphFamily
    anchor: tuple[int, ...]
    pair_mode: bool
    weights: MetaWeights
    # genuine edges (left, right, weight), sorted; weights summed over parallel switchings
    edges: tuple[tuple[int, int, int], ...]
    completion_edges: tuple[tuple[int, int, int], ...] = ()
    completed: bool = False
    # (left, right) -> switchings realising that edge; empty tuple for identity edges
    witnesses: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def params(self) -> DegreeParams:
        return self.left_family.params

    def all_edges(self) -> tuple[tuple[int, int, int], ...]:
        return self.edges + self.completion_edges

    def _degrees(self, side: int, size: int, edges) -> np.ndarray:
        deg = np.zeros(size, dtype=np.int64)
        for e in edges:
            deg[e[side]] += e[2]
        return deg

    def left_degrees(self, genuine_only: bool = False) -> np.ndarray:
        edges = self.edges if genuine_only else self.all_edges()
        return self._degrees(0, len(self.left_family), edges)

    def right_degrees(self, genuine_only: bool = False) -> np.ndarray:
        edges = self.edges if genuine_only else self.all_edges()
        return self._degrees(1, len(self.right_family), edges)

    def degree_brackets(self) -> dict:
        """Brackets for genuine left and right degrees (lower bounds clamped at 0)."""
        n, d1, d2 = self.params.n, self.params.d1, self.params.d2
        w = self.weights
        if self.pair_mode:
            left = (max(0, d1**4 * d2 * (d2 - 1) * (n - d2) * (n - 3 * d2)), w.left_target)
            right = (max(0, d1**4 * (n - d2) ** 2 * (n - 2 * d2) * (n - 1)), w.right_target)
        else:
            left = (max(0, d1**2 * d2 * (n - 2 * d2)), w.left_target)
            right = (max(0, d1**2 * (n - d2) ** 2), w.right_target)
        return {"left": left, "right": right}


def _normalise_anchor(anchor, pair_mode: bool) -> tuple[int, ...]:
    anchor = tuple(int(a) for a in anchor)
    if len(anchor) != (3 if pair_mode else 2):
        raise AnchorPatternMismatch(f"anchor {anchor} does not fit {'pair' if pair_mode else 'single'} mode")
    if pair_mode and anchor[0] == anchor[1]:
        raise AnchorPatternMismatch("pair anchors need u1 != u2")
    return anchor


def _constraint(anchor, pair_mode: bool) -> EdgeConstraint:
    if pair_mode:
        return EdgeConstraint.pair(*anchor)
    return EdgeConstraint.single(*anchor)


def _anchor_holds(g: BiregularGraph, anchor) -> bool:
    *lefts, v1 = anchor
    return all(g.has_edge(u, v1) for u in lefts)


def _toggled_key(key: tuple[int, ...], m: int, kind: Kind, left, right) -> tuple[int, ...]:
    removed, added, _ = SwitchingTuple(kind, left, right).cells()
    rows = list(key)
    for u, v in removed + added:
        rows[u] ^= 1 << (m - 1 - v)
    return tuple(rows)


def build_meta_graph(params, anchor, pair_mode: bool = False, *, cap: int = DEFAULT_MEMBER_CAP,
                     family: GraphFamily | None = None) -> MetaGraph:
    """Genuine meta-graph over enumerated families (identity and switching edges only)."""
    if not isinstance(params, DegreeParams):
        params = check_margins(*params)
    anchor = _normalise_anchor(anchor, pair_mode)
    left = family if family is not None else enumerate_family(params, cap=cap)
    right = enumerate_family(params, _constraint(anchor, pair_mode), cap=cap)
    w = meta_weights(params, pair_mode)
    m = params.m
    acc: dict[tuple[int, int], int] = {}
    witnesses: dict[tuple[int, int], list] = {}

    for i, g in enumerate(left):
        if _anchor_holds(g, anchor):
            j = right.index[g.key]
            acc[(i, j)] = acc.get((i, j), 0) + w.identity
            witnesses.setdefault((i, j), [])
            continue
        kind = anchor_kinds(g, anchor)[0]
        weight = w.switch3 if kind is Kind.TYPE3_FWD else w.switch
        for L, R in _iter_raw(g, anchor, kind):
            j = right.index[_toggled_key(g.key, m, kind, L, R)]
            acc[(i, j)] = acc.get((i, j), 0) + weight
            witnesses.setdefault((i, j), []).append(SwitchingTuple(kind, L, R))

    edges = tuple(sorted((i, j, wt) for (i, j), wt in acc.items()))
    return MetaGraph(left, right, anchor, pair_mode, w, edges,
                     witnesses={k: tuple(v) for k, v in witnesses.items()})


def complete_meta_graph(g0: MetaGraph) -> MetaGraph:
    """Pad weights until every left degree and every right degree hits its target.

    Deficits are routed greedily: left vertices in canonical order, each to the
    lowest-indexed right vertex that still has spare capacity.
    """
    if g0.completed:
        return g0
    w = g0.weights
    left_def = w.left_target - g0.left_degrees(genuine_only=True)
    right_def = w.right_target - g0.right_degrees(genuine_only=True)
    if (left_def < 0).any() or (right_def < 0).any():
        raise CompletionImpossible("a genuine degree already exceeds its target")
    if int(left_def.sum()) != int(right_def.sum()):
        raise CompletionImpossible(
            f"left deficit {int(left_def.sum())} != right deficit {int(right_def.sum())}"
        )
    extra = []
    cap = right_def.copy()
    j = 0
    for i in range(len(left_def)):
        need = int(left_def[i])
        while need:
            while cap[j] == 0:
                j += 1
            amount = min(need, int(cap[j]))
            extra.append((i, j, amount))
            cap[j] -= amount
            need -= amount
    return MetaGraph(g0.left_family, g0.right_family, g0.anchor, g0.pair_mode, g0.weights,
                     g0.edges, tuple(extra), True, g0.witnesses)


def dump_edges(meta: MetaGraph) -> str:
    """Weighted edge list, one ``<left_idx> <right_idx> <weight>`` per line."""
    return "".join(f"{i} {j} {wt}\n" for i, j, wt in meta.all_edges())


# --- coupled step ---------------------------------------------------------------


@dataclass(frozen=True)
class CoupledStepOutcome:
    source: BiregularGraph
    target: BiregularGraph
    in_B: bool
    switching_used: SwitchingTuple | None = None
    # scalable mode: probability mass of padding edges at the source / target
    source_residual: float | None = None
    target_residual: float | None = None


class _Walker:
    """Vectorised weighted walk on a completed meta-graph."""

    def __init__(self, meta: MetaGraph):
        if not meta.completed:
            meta = complete_meta_graph(meta)
        self.meta = meta
        edges = meta.all_edges()
        genuine = len(meta.edges)
        order = sorted(range(len(edges)), key=lambda k: (edges[k][0], k))
        arr = np.array([edges[k] for k in order], dtype=np.int64).reshape(-1, 3)
        self.right = arr[:, 1]
        self.genuine = np.array([k < genuine for k in order], dtype=bool)
        self.cum = np.cumsum(arr[:, 2])
        starts = np.searchsorted(arr[:, 0], np.arange(len(meta.left_family)), side="left")
        self.base = np.concatenate([[0], self.cum])[starts]
        self.total = meta.weights.left_target

    def step(self, sources: np.ndarray, rng: np.random.Generator):
        r = rng.integers(0, self.total, size=len(sources))
        k = np.searchsorted(self.cum, self.base[sources] + r, side="right")
        return self.right[k], self.genuine[k]


def coupled_steps(meta: MetaGraph, sources, rng: np.random.Generator):
    """Walk one step from each source index; returns ``(target_indices, in_B)`` arrays."""
    walker = _Walker(meta)
    return walker.step(np.asarray(sources, dtype=np.int64), rng)


def coupled_step(g: BiregularGraph, anchor, pair_mode: bool, rng: np.random.Generator, *,
                 meta: MetaGraph | None = None, report_mass: bool = False,
                 budget: int = 100_000) -> CoupledStepOutcome:
    """One step of the size-biased coupling from ``g``.

    With ``meta`` (a meta-graph over the enumerated family) the step follows the
    completed meta-graph exactly. Without it the step is local: identity when the
    anchor already holds, else a uniformly random valid switching, drawn by
    rejection from the candidate product set. Padding edges are never taken;
    ``report_mass`` fills in how much weight they carry at the source and target.
    """
    anchor = _normalise_anchor(anchor, pair_mode)
    if meta is not None:
        meta = complete_meta_graph(meta)
        i = meta.left_family.index_of(g)
        tgt, inb = coupled_steps(meta, [i], rng)
        j, in_B = int(tgt[0]), bool(inb[0])
        target = meta.right_family[j]
        used = None
        if in_B:
            tuples = meta.witnesses.get((i, j), ())
            if tuples:
                used = tuples[int(rng.integers(len(tuples)))]
        return CoupledStepOutcome(g, target, in_B, used)

    if _anchor_holds(g, anchor):
        target, used = g, None
    else:
        used = _draw_switching(g, anchor, anchor_kinds(g, anchor)[0], rng, budget)
        target = _apply_trusted(g, used)
    out = CoupledStepOutcome(g, target, True, used)
    if report_mass:
        src_res, tgt_res = _residual_mass(g, target, anchor, pair_mode)
        out = CoupledStepOutcome(g, target, True, used, src_res, tgt_res)
    return out


def _apply_trusted(g: BiregularGraph, t: SwitchingTuple) -> BiregularGraph:
    removed, added, _ = t.cells()
    rows = [set(r) for r in g.row_adj]
    for u, v in removed:
        rows[u].discard(v)
    for u, v in added:
        rows[u].add(v)
    return _from_row_sets(g.params, rows)


def _draw_forward(adj: _Adj, a1, b1, rng, avoid_a2=None):
    """One rejection proposal for a forward switching at (a1, b1); None if rejected."""
    a2 = adj.cols[b1][rng.integers(len(adj.cols[b1]))]
    if a2 == avoid_a2:
        return None
    b2 = adj.rows[a1][rng.integers(len(adj.rows[a1]))]
    comp = adj.col_complement(b2)
    a3 = comp[rng.integers(len(comp))]
    b3 = adj.rows[a3][rng.integers(len(adj.rows[a3]))]
    if adj.edge(a2, b3):
        return None
    return a2, a3, b2, b3


def _draw_switching(g: BiregularGraph, anchor, kind: Kind, rng, budget: int) -> SwitchingTuple:
    # every candidate in the product set is equally likely, so accepted draws are uniform
    adj = _Adj(g)
    m = g.m
    for _ in range(budget):
        if kind is Kind.FORWARD:
            u1, v1 = anchor
            r = _draw_forward(adj, u1, v1, rng)
            if r:
                return SwitchingTuple(kind, (u1, r[0], r[1]), (v1, r[2], r[3]))
        elif kind is Kind.TYPE1_FWD:
            u1, u2, v1 = anchor
            r = _draw_forward(adj, u2, v1, rng, avoid_a2=u1)
            if r:
                return SwitchingTuple(kind, (u1, u2, r[0], r[1]), (v1, r[2], r[3]))
        elif kind is Kind.TYPE2_FWD:
            u1, u2, v1 = anchor
            r = _draw_forward(adj, u1, v1, rng, avoid_a2=u2)
            if r:
                return SwitchingTuple(kind, (u1, u2, r[0], r[1]), (v1, r[2], r[3]))
        else:
            u1, u2, v1 = anchor
            a = _draw_forward(adj, u2, v1, rng)
            b = _draw_forward(adj, u1, v1, rng)
            if a and b:
                t = SwitchingTuple(kind, (u1, u2, a[0], a[1], b[0], b[1]), (v1, a[2], a[3], b[2], b[3]))
                removed, added, _ = t.cells()
                if len(set(removed)) == 6 and len(set(added)) == 6:
                    return t
    if count_switchings(g, anchor, kind).value == 0:
        raise NoValidSwitching(f"no valid {kind.value} switching at {anchor}")
    return _draw_switching(g, anchor, kind, rng, budget)


def _genuine_degree(g: BiregularGraph, anchor, pair_mode: bool, w: MetaWeights, side: str) -> int:
    kinds = anchor_kinds(g, anchor)
    if side == "left":
        if _anchor_holds(g, anchor):
            return w.identity
        kind = kinds[0]
        weight = w.switch3 if kind is Kind.TYPE3_FWD else w.switch
        return weight * count_switchings(g, anchor, kind).value
    total = w.identity
    for kind in kinds:
        weight = w.switch3 if kind is Kind.TYPE3_BWD else w.switch
        total += weight * count_switchings(g, anchor, kind).value
    return total


def _residual_mass(source, target, anchor, pair_mode):
    w = meta_weights(source.params, pair_mode)
    left = _genuine_degree(source, anchor, pair_mode, w, "left")
    right = _genuine_degree(target, anchor, pair_mode, w, "right")
    return 1 - left / w.left_target, 1 - right / w.right_target


def residual_mass(g: BiregularGraph, anchor, pair_mode: bool, side: str) -> float:
    """Padding-edge share of the weight at ``g`` as a left (source) or right (target) vertex."""
    anchor = _normalise_anchor(anchor, pair_mode)
    w = meta_weights(g.params, pair_mode)
    target = w.left_target if side == "left" else w.right_target
    return 1 - _genuine_degree(g, anchor, pair_mode, w, side) / target


def empirical_in_b(meta: MetaGraph, steps: int, rng: np.random.Generator):
    """Simulate ``steps`` coupled steps from uniform sources.

    Returns ``(sources, targets, in_B)`` index arrays.
    """
    walker = _Walker(meta)
    sources = rng.integers(0, len(meta.left_family), size=steps)
    targets, inb = walker.step(sources, rng)
    return sources, targets, inb


def iter_anchors(params: DegreeParams, pair_mode: bool) -> Iterable[tuple[int, ...]]:
    if pair_mode:
        for u1 in range(params.n):
            for u2 in range(params.n):
                if u1 != u2:
                    for v1 in range(params.m):
                        yield (u1, u2, v1)
    else:
        for u1 in range(params.n):
            for v1 in range(params.m):
                yield (u1, v1)
