"""Exhaustive enumeration of biregular families at tiny scale.

Families are the brute-force oracle for every probabilistic statement checked
elsewhere: exact means, exact tail probabilities, meta-graph degrees.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleMargins, ParamInconsistency, SizeLimitExceeded
from .graph_core import BiregularGraph, DegreeParams

DEFAULT_MEMBER_CAP = 5_000_000


def gale_ryser(row_sums: Sequence[int], col_sums: Sequence[int]) -> bool:
    """True when some 0/1 matrix has the given margins."""
    rows = sorted((int(r) for r in row_sums), reverse=True)
    cols = [int(c) for c in col_sums]
    if any(r < 0 for r in rows) or any(c < 0 for c in cols):
        return False
    if sum(rows) != sum(cols):
        return False
    if any(r > len(cols) for r in rows):
        return False
    for k in range(1, len(rows) + 1):
        if sum(rows[:k]) > sum(min(c, k) for c in cols):
            return False
    return True


def check_margins(n: int, m: int, d1: int, d2: int) -> DegreeParams:
    """Validate raw margins, raising InfeasibleMargins before anything is built."""
    if n * d1 != m * d2:
        raise InfeasibleMargins(f"n*d1 = {n}*{d1} != m*d2 = {m}*{d2}")
    if not gale_ryser([d1] * n, [d2] * m):
        raise InfeasibleMargins(f"no 0/1 matrix with margins ({n},{m},{d1},{d2})")
    try:
        return DegreeParams(n, m, d1, d2)
    except ParamInconsistency as exc:
        raise InfeasibleMargins(str(exc)) from exc


@dataclass(frozen=True)
class EdgeConstraint:
    forced_ones: frozenset = field(default_factory=frozenset)
    forced_zeros: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "forced_ones", frozenset(tuple(map(int, p)) for p in self.forced_ones))
        object.__setattr__(self, "forced_zeros", frozenset(tuple(map(int, p)) for p in self.forced_zeros))
        clash = self.forced_ones & self.forced_zeros
        if clash:
            raise ParamInconsistency(f"pairs forced both ways: {sorted(clash)}")

    @classmethod
    def single(cls, u: int, v: int) -> "EdgeConstraint":
        return cls(frozenset({(u, v)}))

    @classmethod
    def pair(cls, u1: int, u2: int, v1: int) -> "EdgeConstraint":
        return cls(frozenset({(u1, v1), (u2, v1)}))

    def validate(self, params: DegreeParams):
        for u, v in self.forced_ones | self.forced_zeros:
            if not (0 <= u < params.n and 0 <= v < params.m):
                raise ParamInconsistency(f"constraint pair ({u},{v}) outside [{params.n}]x[{params.m}]")

    def satisfied_by(self, g: BiregularGraph) -> bool:
        return all(g.has_edge(u, v) for u, v in self.forced_ones) and not any(
            g.has_edge(u, v) for u, v in self.forced_zeros
        )

    @property
    def empty(self) -> bool:
        return not self.forced_ones and not self.forced_zeros


NO_CONSTRAINT = EdgeConstraint()


@dataclass(frozen=True)
class GraphFamily:
    params: DegreeParams
    constraint: EdgeConstraint
    members: tuple[BiregularGraph, ...]

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @cached_property
    def index(self) -> dict:
        """Map from ``BiregularGraph.key`` to member position."""
        return {g.key: i for i, g in enumerate(self.members)}

    def index_of(self, g: BiregularGraph) -> int:
        return self.index[g.key]

    @cached_property
    def matrices(self) -> np.ndarray:
        """Stacked biadjacency matrices, shape ``(len, n, m)``."""
        if not self.members:
            return np.zeros((0, self.params.n, self.params.m), dtype=np.int8)
        return np.stack([g.matrix for g in self.members])


# --- exact counting (independent of the enumerator) -------------------------


@lru_cache(maxsize=None)
def _count_by_capacity(caps: tuple, rows_left: int, d1: int) -> int:
    # caps: sorted tuple of remaining column capacities; columns are exchangeable.
    if rows_left == 0:
        return 1 if all(c == 0 for c in caps) else 0
    if any(c > rows_left for c in caps):
        return 0
    classes = sorted(Counter(c for c in caps if c > 0).items())
    zeros = sum(1 for c in caps if c == 0)
    total = 0

    def rec(i, need, picks):
        nonlocal total
        if i == len(classes):
            if need:
                return
            mult = 1
            new_caps = [0] * zeros
            for (cap, cnt), k in zip(classes, picks):
                mult *= comb(cnt, k)
                new_caps += [cap - 1] * k + [cap] * (cnt - k)
            total += mult * _count_by_capacity(tuple(sorted(new_caps)), rows_left - 1, d1)
            return
        cap, cnt = classes[i]
        for k in range(min(cnt, need) + 1):
            rec(i + 1, need - k, picks + (k,))

    rec(0, d1, ())
    return total


def count_family(params: DegreeParams) -> int:
    """Exact size of the unconstrained family by capacity-class dynamic programming."""
    return _count_by_capacity(tuple([params.d2] * params.m), params.n, params.d1)


# --- enumeration --------------------------------------------------------------


def _row_candidates(m: int, d1: int) -> list[tuple[int, tuple[int, ...]]]:
    cands = []
    for cols in itertools.combinations(range(m), d1):
        mask = sum(1 << (m - 1 - v) for v in cols)
        cands.append((mask, cols))
    cands.sort()
    return cands


def _row_masks(params: DegreeParams, constraint: EdgeConstraint):
    m, n = params.m, params.n
    ones = [0] * n
    zeros = [0] * n
    for u, v in constraint.forced_ones:
        ones[u] |= 1 << (m - 1 - v)
    for u, v in constraint.forced_zeros:
        zeros[u] |= 1 << (m - 1 - v)
    return ones, zeros


def _search(params, constraint, first_rows, cap):
    """Backtracking over rows in ascending bitmask order; returns list of row tuples."""
    n, m, d1, d2 = params.as_tuple()
    cands = _row_candidates(m, d1)
    ones, zeros = _row_masks(params, constraint)
    bits = [1 << (m - 1 - v) for v in range(m)]
    capacity = [d2] * m
    rows: list[tuple[int, ...]] = []
    out: list[tuple[tuple[int, ...], ...]] = []

    def rec(u):
        if u == n:
            out.append(tuple(rows))
            if len(out) > cap:
                raise SizeLimitExceeded(f"family exceeds member cap {cap}")
            return
        rows_left = n - u
        avail = 0
        must = 0
        for v in range(m):
            c = capacity[v]
            if c > 0:
                avail |= bits[v]
                if c == rows_left:
                    must |= bits[v]
            # c > rows_left is unreachable: pruned when the previous row was placed
        pool = cands if u > 0 or first_rows is None else first_rows
        for mask, cols in pool:
            if mask & ~avail or must & ~mask:
                continue
            if ones[u] & ~mask or zeros[u] & mask:
                continue
            ok = True
            for v in cols:
                capacity[v] -= 1
            for v in range(m):
                if capacity[v] > rows_left - 1:
                    ok = False
                    break
            if ok:
                rows.append(cols)
                rec(u + 1)
                rows.pop()
            for v in cols:
                capacity[v] += 1

    rec(0)
    return out


def _search_chunk(args):
    params, constraint, chunk, cap = args
    return _search(params, constraint, chunk, cap)


def enumerate_family(
    params,
    constraint: EdgeConstraint | None = None,
    *,
    cap: int = DEFAULT_MEMBER_CAP,
    workers: int = 1,
) -> GraphFamily:
    """All graphs with the given parameters satisfying ``constraint``, in canonical order.

    Canonical order is lexicographic on the tuple of row bitmasks (bit ``m-1-v``
    encodes column ``v``). Raises InfeasibleMargins before searching when the
    margins admit no matrix, and SizeLimitExceeded when the exact unconstrained
    count (an upper bound for any constrained family) exceeds ``cap``.
    """
    if not isinstance(params, DegreeParams):
        params = check_margins(*params)
    constraint = constraint or NO_CONSTRAINT
    constraint.validate(params)
    n, m, d1, d2 = params.as_tuple()
    if not gale_ryser([d1] * n, [d2] * m):
        raise InfeasibleMargins(f"no 0/1 matrix with margins {params}")
    bound = count_family(params)
    if bound > cap:
        raise SizeLimitExceeded(f"{params} has {bound} members, cap is {cap}")

    if workers > 1 and n > 1:
        first = _row_candidates(m, d1)
        chunks = [first[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_search_chunk, [(params, constraint, c, cap) for c in chunks]))
        rows_list = sorted(itertools.chain.from_iterable(parts), key=lambda r: _rows_key(r, m))
    else:
        rows_list = _search(params, constraint, None, cap)

    members = tuple(_trusted_graph(params, rows) for rows in rows_list)
    return GraphFamily(params, constraint, members)


def _rows_key(rows, m):
    return tuple(sum(1 << (m - 1 - v) for v in r) for r in rows)


def _trusted_graph(params: DegreeParams, rows) -> BiregularGraph:
    cols: list[list[int]] = [[] for _ in range(params.m)]
    for u, r in enumerate(rows):
        for v in r:
            cols[v].append(u)
    return BiregularGraph(params, tuple(tuple(r) for r in rows), tuple(tuple(c) for c in cols))


def enumerate_permuted(params, rng: np.random.Generator, constraint: EdgeConstraint | None = None,
                       cap: int = DEFAULT_MEMBER_CAP) -> set:
    """Recompute a family under random row/column relabelling; returns the set of keys.

    The search runs on relabelled vertices, so its visiting order differs from
    :func:`enumerate_family`. Results are mapped back before comparison.
    """
    if not isinstance(params, DegreeParams):
        params = check_margins(*params)
    constraint = constraint or NO_CONSTRAINT
    n, m = params.n, params.m
    rp = rng.permutation(n)
    cp = rng.permutation(m)
    moved = EdgeConstraint(
        frozenset((int(rp[u]), int(cp[v])) for u, v in constraint.forced_ones),
        frozenset((int(rp[u]), int(cp[v])) for u, v in constraint.forced_zeros),
    )
    fam = enumerate_family(params, moved, cap=cap)
    keys = set()
    for g in fam:
        Xp = g.matrix
        X = Xp[np.ix_(rp, cp)]  # X[u, v] = Xp[rp[u], cp[v]]
        keys.add(tuple(int("".join(map(str, row)), 2) for row in X))
    return keys


def family_ratio(params, constraint: EdgeConstraint, *, cap: int = DEFAULT_MEMBER_CAP) -> Fraction:
    """Exact ``|constrained family| / |family|``."""
    full = enumerate_family(params, cap=cap)
    sub = enumerate_family(full.params, constraint, cap=cap)
    return Fraction(len(sub), len(full))


def edge_means(family: GraphFamily) -> list[list[Fraction]]:
    """Exact mean of every ``X[u, v]`` over the family."""
    counts = family.matrices.astype(np.int64).sum(axis=0)
    N = len(family)
    return [[Fraction(int(c), N) for c in row] for row in counts]


def codegree_means(family: GraphFamily) -> list[list[Fraction]]:
    """Exact mean codegree of every left pair over the family (diagonal left at zero)."""
    X = family.matrices.astype(np.int64)
    C = np.einsum("kuv,kwv->uw", X, X)
    np.fill_diagonal(C, 0)
    N = len(family)
    return [[Fraction(int(c), N) for c in row] for row in C]


def iter_keys(graphs: Iterable[BiregularGraph]):
    for g in graphs:
        yield g.key
