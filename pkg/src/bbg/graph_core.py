"""Bipartite biregular graphs: representation, queries, derived matrices, BBG1 text format.

Vertices are 0-based on both sides. Left vertices are ``0..n-1`` (rows of the
biadjacency matrix ``X``), right vertices are ``0..m-1`` (columns).
"""

from __future__ import annotations

import re
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegreeViolation,
    DuplicateEdge,
    IndexOutOfRange,
    ParamInconsistency,
    ParseError,
)

__all__ = [
    "DegreeParams",
    "BiregularGraph",
    "build_graph",
    "from_matrix",
    "codegree",
    "codegree_matrix",
    "adjacency_matrix",
    "serialize",
    "deserialize",
    "serialize_many",
    "deserialize_many",
]


@dataclass(frozen=True, order=True)
class DegreeParams:
    """The quadruple ``(n, m, d1, d2)`` with ``n*d1 == m*d2``."""

    n: int
    m: int
    d1: int
    d2: int

    def __post_init__(self):
        for name in ("n", "m", "d1", "d2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ParamInconsistency(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        n, m, d1, d2 = self.n, self.m, self.d1, self.d2
        if n * d1 != m * d2:
            raise ParamInconsistency(f"n*d1 = {n * d1} != m*d2 = {m * d2}")
        if not (1 <= d2 <= d1 <= m and d2 <= n):
            raise ParamInconsistency(
                f"need 1 <= d2 <= d1 <= m and d2 <= n, got (n,m,d1,d2)=({n},{m},{d1},{d2})"
            )

    @property
    def num_edges(self) -> int:
        return self.n * self.d1

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.m, self.d1, self.d2)

    def __str__(self):
        return f"({self.n},{self.m},{self.d1},{self.d2})"


@dataclass(frozen=True)
class BiregularGraph:
    """Immutable biregular bipartite graph with sorted row and column adjacency lists.

    Construct through :func:`build_graph` or :func:`from_matrix`; the raw
    constructor trusts its arguments.
    """

    params: DegreeParams
    row_adj: tuple[tuple[int, ...], ...]
    col_adj: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def m(self) -> int:
        return self.params.m

    def has_edge(self, u: int, v: int) -> bool:
        row = self.row_adj[u]
        i = bisect_left(row, v)
        return i < len(row) and row[i] == v

    def neighbors(self, u: int) -> tuple[int, ...]:
        """Right neighbours of left vertex ``u``."""
        return self.row_adj[u]

    def col_neighbors(self, v: int) -> tuple[int, ...]:
        """Left neighbours of right vertex ``v``."""
        return self.col_adj[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, row in enumerate(self.row_adj) for v in row]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense ``n x m`` 0/1 biadjacency matrix (read-only, int8)."""
        X = np.zeros((self.n, self.m), dtype=np.int8)
        for u, row in enumerate(self.row_adj):
            X[u, list(row)] = 1
        X.setflags(write=False)
        return X

    @cached_property
    def key(self) -> tuple[int, ...]:
        """Row bitmasks, most significant bit = column 0. Orders graphs lexicographically."""
        m = self.m
        return tuple(sum(1 << (m - 1 - v) for v in row) for row in self.row_adj)

    def __eq__(self, other):
        if not isinstance(other, BiregularGraph):
            return NotImplemented
        return self.params == other.params and self.row_adj == other.row_adj

    def __hash__(self):
        return hash((self.params, self.row_adj))

    def __repr__(self):
        return f"BiregularGraph{self.params}"


def _check_params(params) -> DegreeParams:
    if isinstance(params, DegreeParams):
        return params
    return DegreeParams(*params)


def build_graph(params, edges: Iterable[Sequence[int]]) -> BiregularGraph:
    """Validate an edge list and return the graph.

    Raises ParamInconsistency, IndexOutOfRange, DuplicateEdge or DegreeViolation.
    """
    params = _check_params(params)
    n, m, d1, d2 = params.as_tuple()
    rows: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < m):
            raise IndexOutOfRange(f"edge ({u},{v}) outside [{n}]x[{m}]")
        if v in rows[u]:
            raise DuplicateEdge(f"edge ({u},{v}) listed twice")
        rows[u].add(v)
    return _from_row_sets(params, rows)


def _from_row_sets(params: DegreeParams, rows) -> BiregularGraph:
    n, m, d1, d2 = params.as_tuple()
    cols: list[list[int]] = [[] for _ in range(m)]
    for u, row in enumerate(rows):
        if len(row) != d1:
            raise DegreeViolation(f"left vertex {u} has degree {len(row)}, expected {d1}")
        for v in row:
            cols[v].append(u)
    for v, col in enumerate(cols):
        if len(col) != d2:
            raise DegreeViolation(f"right vertex {v} has degree {len(col)}, expected {d2}")
    return BiregularGraph(
        params,
        tuple(tuple(sorted(r)) for r in rows),
        tuple(tuple(c) for c in cols),  # already ascending: rows scanned in order
    )


def from_matrix(X, params=None) -> BiregularGraph:
    """Build a graph from a dense 0/1 matrix; parameters are inferred when omitted."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise DegreeViolation("biadjacency matrix must be 2-dimensional")
    if not np.isin(X, (0, 1)).all():
        raise DegreeViolation("biadjacency matrix must be 0/1")
    n, m = X.shape
    if params is None:
        d1 = int(X[0].sum()) if n else 0
        d2 = int(X[:, 0].sum()) if m else 0
        params = DegreeParams(n, m, d1, d2)
    params = _check_params(params)
    if (n, m) != (params.n, params.m):
        raise DegreeViolation(f"matrix shape {X.shape} does not match {params}")
    rows = [set(np.flatnonzero(X[u]).tolist()) for u in range(n)]
    return _from_row_sets(params, rows)


def codegree(g: BiregularGraph, i: int, j: int) -> int:
    """Number of right vertices adjacent to both left vertices ``i`` and ``j``."""
    n = g.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"left vertices ({i},{j}) outside [{n}]")
    if i == j:
        return g.params.d1
    a, b = g.row_adj[i], g.row_adj[j]
    return len(set(a).intersection(b))


def codegree_matrix(g: BiregularGraph) -> np.ndarray:
    """``X X^T - d1 I`` as a dense int64 array: codegrees off the diagonal, zeros on it."""
    X = g.matrix.astype(np.int64)
    M = X @ X.T
    np.fill_diagonal(M, 0)
    return M


def adjacency_matrix(g: BiregularGraph) -> np.ndarray:
    """Full symmetric ``(n+m) x (n+m)`` adjacency matrix ``[[0, X], [X^T, 0]]``."""
    n, m = g.n, g.m
    A = np.zeros((n + m, n + m), dtype=np.float64)
    A[:n, n:] = g.matrix
    A[n:, :n] = g.matrix.T
    return A


# --- BBG1 text format -------------------------------------------------------

_HEADER = re.compile(r"BBG1 (\d+) (\d+) (\d+) (\d+)")
_ROW = re.compile(r"(\d+):((?: \d+)*)")


def serialize(g: BiregularGraph) -> str:
    n, m, d1, d2 = g.params.as_tuple()
    lines = [f"BBG1 {n} {m} {d1} {d2}"]
    for u, row in enumerate(g.row_adj):
        lines.append(f"{u}:" + "".join(f" {v}" for v in row))
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> BiregularGraph:
    """Parse one BBG1 record. A missing final newline is tolerated."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return _parse_lines(lines, first_line=1)


def _parse_lines(lines: list[str], first_line: int) -> BiregularGraph:
    if not lines:
        raise ParseError("empty record", line=first_line)
    head = _HEADER.fullmatch(lines[0])
    if head is None:
        raise ParseError("expected header 'BBG1 <n> <m> <d1> <d2>'", line=first_line, column=1)
    params = DegreeParams(*(int(x) for x in head.groups()))
    n, m = params.n, params.m
    if len(lines) - 1 != n:
        raise ParseError(f"expected {n} row lines, found {len(lines) - 1}", line=first_line)
    edges = []
    for u in range(n):
        lineno = first_line + 1 + u
        line = lines[u + 1]
        match = _ROW.fullmatch(line)
        if match is None:
            col = 1
            for k, ch in enumerate(line):
                if not (ch.isdigit() or ch in ": "):
                    col = k + 1
                    break
            else:
                col = len(line) + 1 if line.endswith(" ") or not line else 1
            raise ParseError(f"malformed row line {line!r}", line=lineno, column=col)
        if int(match.group(1)) != u:
            raise ParseError(f"expected row label {u}, got {match.group(1)}", line=lineno, column=1)
        prev = -1
        col = len(match.group(1)) + 2
        for tok in match.group(2).split():
            v = int(tok)
            if v == prev:
                raise DuplicateEdge(f"edge ({u},{v}) listed twice on line {lineno}")
            if v < prev:
                raise ParseError("row entries must be sorted ascending", line=lineno, column=col + 1)
            if v >= m:
                raise IndexOutOfRange(f"edge ({u},{v}) outside [{n}]x[{m}] on line {lineno}")
            edges.append((u, v))
            prev = v
            col += len(tok) + 1
    return build_graph(params, edges)


def serialize_many(graphs: Iterable[BiregularGraph]) -> str:
    """Concatenate BBG1 records separated by one blank line."""
    return "\n".join(serialize(g) for g in graphs)


def deserialize_many(text: str) -> list[BiregularGraph]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out, block, start = [], [], 1
    for i, line in enumerate(lines, start=1):
        if line == "":
            if block:
                out.append(_parse_lines(block, start))
            block, start = [], i + 1
        else:
            if not block:
                start = i
            block.append(line)
    if block:
        out.append(_parse_lines(block, start))
    return out
