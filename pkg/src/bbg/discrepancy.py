"""Discrepancy property for X and for M = X X^T - d1 I, and the heavy-couple bound.

A pair of index sets (S, T) passes when either its edge count is at most
``kappa1 * delta * |S| |T|``, or ``e log(e / (delta |S||T|))`` is at most
``kappa2 * s * log(e * pop / s)`` with ``s = max(|S|, |T|)``. The second case
is taken as satisfied whenever ``e <= delta |S||T|`` (the log factor is then
nonpositive), which also covers ``e = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import CapExceeded, DomainError, EmptySubset, IndexOutOfRange
from .graph_core import BiregularGraph, DegreeParams
from .linstat import classify_couples

X_MODE_CAP = 24  # n + m
M_MODE_CAP = 14  # n


@dataclass(frozen=True)
class DiscrepancyParams:
    mode: str
    delta: float
    kappa1: float
    kappa2: float
    K: float
    alpha0: float
    pop: int  # population in the case-2 logarithm

    def to_dict(self) -> dict:
        return asdict(self)


def dp_params(params: DegreeParams, K: float = 1.0, mode: str = "X") -> DiscrepancyParams:
    n, m, d1, d2 = params.as_tuple()
    if mode == "X":
        if m <= d1:
            raise DomainError("X-mode constants need m > d1")
        delta = d1 / m
        gamma0 = d1 / (m - d1)
        c0 = (1 - d1 / m) / 3
        kappa1 = math.e**2 * (1 + gamma0) ** 2
        kappa2 = (2 / c0) * (1 + gamma0) * (K + 4)
        alpha0 = 48 + 32 * kappa1 + 64 * kappa2 * (1 + 1 / (kappa1 * math.log(kappa1)))
        pop = m
    elif mode == "M":
        if n <= 2 * d2:
            raise DomainError("M-mode constants need n > 2 d2")
        delta = d1 * (d2 - 1) / (n - 1)
        gamma0 = 2 * d2 / (n - 2 * d2)
        c0 = (1 - 2 * d2 / n) / 6
        kappa1 = math.e**2 * (1 + gamma0) ** 2
        kappa2 = (8 * d2 / c0) * (1 + gamma0) * (K + 4)
        alpha0 = 16 + 64 * (kappa1 + 1) + 64 * kappa2 * (1 + 2 / (kappa1 * math.log(kappa1)))
        pop = n
    else:
        raise DomainError(f"mode must be 'X' or 'M', got {mode!r}")
    return DiscrepancyParams(mode, delta, kappa1, kappa2, float(K), alpha0, pop)


def source_matrix(g: BiregularGraph, mode: str = "X") -> np.ndarray:
    """X itself, or ``M = X X^T - d1 I`` (codegrees, zero diagonal)."""
    X = g.matrix.astype(np.int64)
    if mode == "X":
        return X
    if mode == "M":
        M = X @ X.T
        np.fill_diagonal(M, 0)
        return M
    raise DomainError(f"mode must be 'X' or 'M', got {mode!r}")


def edge_count(A: np.ndarray, S, T) -> int:
    """``e(S, T) = sum_{u in S, v in T} A[u, v]``."""
    S = np.asarray(sorted(set(int(s) for s in S)), dtype=np.int64)
    T = np.asarray(sorted(set(int(t) for t in T)), dtype=np.int64)
    if len(S) == 0 or len(T) == 0:
        raise EmptySubset("S and T must be nonempty")
    if S.min() < 0 or S.max() >= A.shape[0] or T.min() < 0 or T.max() >= A.shape[1]:
        raise IndexOutOfRange("subset index outside the matrix")
    return int(A[np.ix_(S, T)].sum())


def _cases(e, s, t, dp: DiscrepancyParams):
    """Vectorised (case1_ok, case2_ok) for edge counts ``e`` and subset sizes ``s``, ``t``."""
    e = np.asarray(e, dtype=np.float64)
    base = dp.delta * s * t
    case1 = e <= dp.kappa1 * base
    big = np.maximum(s, t)
    rhs = dp.kappa2 * big * np.log(math.e * dp.pop / big)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = np.where(e > base, e * np.log(np.where(e > 0, e, 1.0) / base), 0.0)
    case2 = (e <= base) | (lhs <= rhs)
    return case1, case2


@dataclass(frozen=True)
class DPWitness:
    S: tuple[int, ...]
    T: tuple[int, ...]
    e_value: int
    case1_ok: bool
    case2_ok: bool
    case1_bound: float
    case2_rhs: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _witness(A, S_idx, T_idx, dp) -> DPWitness:
    e = int(A[np.ix_(S_idx, T_idx)].sum())
    s, t = len(S_idx), len(T_idx)
    c1, c2 = _cases(e, s, t, dp)
    big = max(s, t)
    return DPWitness(tuple(map(int, S_idx)), tuple(map(int, T_idx)), e, bool(c1), bool(c2),
                     dp.kappa1 * dp.delta * s * t, dp.kappa2 * big * math.log(math.e * dp.pop / big))


def _indicator_rows(k: int) -> np.ndarray:
    # rows are all nonempty subsets of range(k), bit i of the row index = element i
    masks = np.arange(1, 1 << k, dtype=np.int64)
    return ((masks[:, None] >> np.arange(k)) & 1).astype(np.int64)


def dp_check(A: np.ndarray, dp: DiscrepancyParams, strategy: str = "exhaustive", *,
             trials: int = 10_000, rng: np.random.Generator | None = None):
    """Return ``(holds, witness)``; the witness is the first failing pair or None.

    Exhaustive mode scans subset pairs in canonical order (S by bitmask, then T).
    Sampled mode draws each element into S and T independently with probability
    1/2, redrawing empty sets.
    """
    A = np.asarray(A, dtype=np.int64)
    n_rows, n_cols = A.shape
    if strategy == "exhaustive":
        if dp.mode == "X" and n_rows + n_cols > X_MODE_CAP:
            raise CapExceeded(f"exhaustive X-mode scan needs n + m <= {X_MODE_CAP}")
        if dp.mode == "M" and n_rows > M_MODE_CAP:
            raise CapExceeded(f"exhaustive M-mode scan needs n <= {M_MODE_CAP}")
        SI = _indicator_rows(n_rows)
        TI = _indicator_rows(n_cols)
        s_sizes = SI.sum(1)
        t_sizes = TI.sum(1)
        AT = A @ TI.T  # (n_rows, 2^cols - 1)
        chunk = max(1, (1 << 22) // max(len(TI), 1))
        for start in range(0, len(SI), chunk):
            block = SI[start:start + chunk]
            E = block @ AT
            c1, c2 = _cases(E, s_sizes[start:start + chunk, None], t_sizes[None, :], dp)
            bad = ~(c1 | c2)
            if bad.any():
                i, j = np.argwhere(bad)[0]
                S_idx = np.flatnonzero(block[i])
                T_idx = np.flatnonzero(TI[j])
                return False, _witness(A, S_idx, T_idx, dp)
        return True, None
    if strategy == "sampled":
        rng = rng or np.random.default_rng(0)
        for _ in range(trials):
            S = rng.random(n_rows) < 0.5
            while not S.any():
                S = rng.random(n_rows) < 0.5
            T = rng.random(n_cols) < 0.5
            while not T.any():
                T = rng.random(n_cols) < 0.5
            e = int(A[np.ix_(S, T)].sum())
            c1, c2 = _cases(e, int(S.sum()), int(T.sum()), dp)
            if not (c1 or c2):
                return False, _witness(A, np.flatnonzero(S), np.flatnonzero(T), dp)
        return True, None
    raise DomainError(f"strategy must be 'exhaustive' or 'sampled', got {strategy!r}")


def heavy_sum(g: BiregularGraph, x, y, dp: DiscrepancyParams) -> tuple[float, bool]:
    """Sum of ``x_u y_v A_uv`` over heavy couples, and whether it is within ``alpha0`` times the scale."""
    p = g.params
    if dp.mode == "X":
        cc = classify_couples(x, y, p, "X")
        W = np.outer(x, y) * g.matrix
        scale = math.sqrt(p.d1)
    else:
        cc = classify_couples(x, None, p, "M")
        W = np.outer(x, x) * source_matrix(g, "M")
        scale = math.sqrt(p.d1 * (p.d2 - 1))
    value = float(W[cc.heavy].sum())
    return value, abs(value) <= dp.alpha0 * scale
