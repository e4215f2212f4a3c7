"""Linear statistics of the biadjacency matrix and their concentration bounds.

``f_Q(X) = sum Q_uv X_uv`` for an ``n x m`` weight matrix and
``g_Q(X) = sum_{u != w} Q_uw codeg(u, w)`` for a symmetric zero-diagonal
``n x n`` matrix. Bounds are Bennett-type tails built from ``mu`` and
``sigma_tilde^2``; every bound is clamped to ``[0, 1]``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateRegime,
    DimensionMismatch,
    DomainError,
    NotMeanZero,
    NotUnitVector,
)
from .graph_core import BiregularGraph, DegreeParams

UNIT_TOL = 1e-12

WHICH = ("upper", "lower", "oneside", "twosided")


def bennett_h(x: float) -> float:
    """``h(x) = (1+x) log(1+x) - x`` for ``x >= -1``, with ``h(-1) = 1``."""
    x = float(x)
    if x < -1 or math.isnan(x):
        raise DomainError(f"h is defined for x >= -1, got {x}")
    if x == -1:
        return 1.0
    return (1 + x) * math.log1p(x) - x


def _check_q(Q, params: DegreeParams, mode: str) -> np.ndarray:
    Q = np.asarray(Q)
    shape = (params.n, params.m) if mode == "f" else (params.n, params.n)
    if Q.shape != shape:
        raise DimensionMismatch(f"{mode}-mode needs Q of shape {shape}, got {Q.shape}")
    if mode not in ("f", "g"):
        raise DomainError(f"mode must be 'f' or 'g', got {mode!r}")
    return Q


def eval_statistic(g: BiregularGraph, Q, mode: str = "f") -> float:
    """``f_Q`` (mode ``f``) or ``g_Q`` (mode ``g``) evaluated on ``g``."""
    Q = _check_q(Q, g.params, mode)
    X = g.matrix
    if mode == "f":
        return (Q * X).sum().item()
    C = X.astype(np.int64) @ X.T.astype(np.int64)
    np.fill_diagonal(C, 0)
    return (Q * C).sum().item()


def eval_statistic_columns(g: BiregularGraph, Q) -> float:
    """``g_Q`` through the column double sum ``sum_v sum_{u != w} Q_uw X_uv X_wv``."""
    Q = _check_q(Q, g.params, "g")
    total = 0
    for col in g.col_adj:
        for u in col:
            for w in col:
                if u != w:
                    total += Q[u, w]
    return total.item() if hasattr(total, "item") else total


def family_statistics(family, Q, mode: str = "f") -> np.ndarray:
    """Statistic of every member of an enumerated family, as an array."""
    Q = _check_q(Q, family.params, mode)
    X = family.matrices.astype(np.int64)
    if mode == "f":
        return np.einsum("kuv,uv->k", X, Q)
    C = np.einsum("kuv,kwv->kuw", X, X)
    idx = np.arange(family.params.n)
    C[:, idx, idx] = 0
    return np.einsum("kuw,uw->k", C, Q)


@dataclass(frozen=True)
class ConcParams:
    mode: str
    mu: float
    sigma_tilde_sq: float
    p: float
    p_prime: float
    c0: float
    gamma0: float
    d2: int
    p_exact: Fraction = Fraction(0)
    p_prime_exact: Fraction = Fraction(0)
    gamma0_exact: Fraction = Fraction(0)
    mu_exact: Fraction | None = None
    sigma_tilde_sq_exact: Fraction | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Fraction):
                d[k] = str(v)
        return d


def conc_params(params: DegreeParams, Q, mode: str = "f", *, exact: bool = False) -> ConcParams:
    """Mean, second-moment parameter and coupling constants for ``Q``.

    With ``exact=True`` the entries of ``Q`` are read as rationals and the
    exact mean and second moment are attached as Fractions.
    """
    Q = _check_q(Q, params, mode)
    n, m, d1, d2 = params.as_tuple()
    if mode == "f":
        if m - d1 <= 0:
            raise DegenerateRegime(f"m - d1 = {m - d1} leaves the coupling constants undefined")
        dens = Fraction(d1, m)
        p = 1 - Fraction(d1, m)
        p_prime = 1 - Fraction(d1, m - d1)
        c0 = p / 3
        gamma0 = Fraction(d1, m - d1)
        mask = np.ones(Q.shape, dtype=bool)
    else:
        if n - 2 * d2 <= 0 or n < 2:
            raise DegenerateRegime(f"n - 2 d2 = {n - 2 * d2} leaves the coupling constants undefined")
        dens = Fraction(d1 * (d2 - 1), n - 1)
        p = 1 - Fraction(2 * d2, n)
        p_prime = 1 - Fraction(2 * d2, n - d2)
        c0 = p / 6
        gamma0 = Fraction(2 * d2, n - 2 * d2)
        mask = ~np.eye(n, dtype=bool)
    vals = Q[mask]
    fvals = vals.astype(np.float64)
    mu = float(dens) * float(fvals.sum())
    sig = float(dens) * float((fvals**2).sum())
    mu_x = sig_x = None
    if exact:
        fr = [Fraction(v) if not isinstance(v, Fraction) else v for v in vals.tolist()]
        mu_x = dens * sum(fr, Fraction(0))
        sig_x = dens * sum((q * q for q in fr), Fraction(0))
        mu, sig = float(mu_x), float(sig_x)
    return ConcParams(mode, mu, sig, float(p), float(p_prime), float(c0), float(gamma0), d2,
                      p, p_prime, gamma0, mu_x, sig_x)


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def tail_bound(cp: ConcParams, a: float, t: float, which: str) -> float:
    """Bound on the probability of the deviation event named by ``which``.

    ``upper``: stat - mu/p >= t.  ``lower``: stat - p' mu <= -t.
    ``oneside``: stat >= (1 + gamma0) mu + t.  ``twosided``: |stat - mu| >= gamma0 mu + t.
    The family of formulas (f or g) follows ``cp.mode``.
    """
    if which not in WHICH:
        raise DomainError(f"which must be one of {WHICH}, got {which!r}")
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    if a <= 0:
        raise DomainError(f"a must be positive, got {a}")
    s2, p, c0 = cp.sigma_tilde_sq, cp.p, cp.c0
    if s2 == 0:
        # the statistic is almost surely at its mean
        return 1.0 if t == 0 else 0.0
    if cp.mode == "f":
        if which == "upper":
            v = math.exp(-s2 / (3 * p * a * a) * bennett_h(p * a * t / s2))
        elif which == "lower":
            v = math.exp(-s2 / (3 * a * a) * bennett_h(a * t / s2))
        elif which == "oneside":
            v = math.exp(-c0 * s2 / (a * a) * bennett_h(a * t / s2))
        else:
            v = 2 * math.exp(-c0 * t * t / (2 * (s2 + a * t / 3)))
    else:
        d2 = cp.d2
        if which == "upper":
            v = math.exp(-s2 / (6 * d2 * p * a * a) * bennett_h(p * a * t / (2 * s2)))
        elif which == "lower":
            v = math.exp(-s2 / (6 * d2 * a * a) * bennett_h(a * t / (2 * s2)))
        elif which == "oneside":
            v = math.exp(-c0 * s2 / (d2 * a * a) * bennett_h(a * t / (2 * s2)))
        else:
            v = 2 * math.exp(-c0 * t * t / (8 * d2 * (s2 + a * t / 6)))
    return _clamp(v)


def deviation_event(values: np.ndarray, cp: ConcParams, t: float, which: str) -> np.ndarray:
    """Boolean mask of samples in the event bounded by ``tail_bound(cp, a, t, which)``."""
    mu = cp.mu
    if which in ("upper", "oneside"):
        return values - mu / cp.p >= t
    if which == "lower":
        return values - cp.p_prime * mu <= -t
    if which == "twosided":
        return np.abs(values - mu) >= cp.gamma0 * mu + t
    raise DomainError(f"which must be one of {WHICH}, got {which!r}")


@dataclass(frozen=True)
class ExactStats:
    """Statistic values ``numerators / denominator`` over an enumerated family."""

    numerators: np.ndarray
    denominator: int

    def __len__(self):
        return len(self.numerators)

    def fractions(self) -> list[Fraction]:
        return [Fraction(int(k), self.denominator) for k in self.numerators]


def exact_family_statistics(family, Q, mode: str = "f") -> ExactStats:
    """Statistic of every member, exactly (``Q`` may hold Fractions)."""
    Q = _check_q(Q, family.params, mode)
    fr = [Fraction(v) for v in Q.ravel().tolist()]
    den = math.lcm(*(f.denominator for f in fr)) if fr else 1
    K = np.array([int(f * den) for f in fr], dtype=np.int64).reshape(Q.shape)
    return ExactStats(np.asarray(family_statistics(family, K, mode), dtype=np.int64), den)


def _count_at_least(stats: ExactStats, thr: Fraction) -> int:
    # number of values s with s >= thr, decided on integers
    k = math.ceil(thr * stats.denominator)
    return int((stats.numerators >= k).sum())


def _count_at_most(stats: ExactStats, thr: Fraction) -> int:
    k = math.floor(thr * stats.denominator)
    return int((stats.numerators <= k).sum())


def exact_tail_probability(stats: ExactStats, cp: ConcParams, t, which: str) -> Fraction:
    """Exact probability of the deviation event over an enumerated family.

    Thresholds use the exact mean and constants, so boundary cases are decided
    without rounding.
    """
    t = Fraction(t)
    mu = cp.mu_exact if cp.mu_exact is not None else Fraction(cp.mu)
    if which in ("upper", "oneside"):
        hits = _count_at_least(stats, mu / cp.p_exact + t)
    elif which == "lower":
        hits = _count_at_most(stats, cp.p_prime_exact * mu - t)
    elif which == "twosided":
        r = cp.gamma0_exact * mu + t
        if r == 0:
            hits = len(stats)
        else:
            hits = _count_at_least(stats, mu + r) + _count_at_most(stats, mu - r)
    else:
        raise DomainError(f"which must be one of {WHICH}, got {which!r}")
    return Fraction(hits, len(stats))


# --- light and heavy couples ---------------------------------------------------


@dataclass(frozen=True)
class CoupleClass:
    mode: str
    threshold: float
    light: np.ndarray  # boolean mask over the index grid
    heavy: np.ndarray
    light_plus: np.ndarray
    light_minus: np.ndarray

    def pairs(self, which: str = "light") -> list[tuple[int, int]]:
        mask = getattr(self, which)
        return [tuple(map(int, p)) for p in np.argwhere(mask)]


def _unit(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector")
    if abs(float(np.linalg.norm(x)) - 1.0) > UNIT_TOL:
        raise NotUnitVector(f"{name} has norm {np.linalg.norm(x)!r}")
    return x


def _mean_zero(x: np.ndarray, name: str):
    if abs(float(x.sum())) > UNIT_TOL:
        raise NotMeanZero(f"{name} sums to {x.sum()!r}")


def couple_threshold(params: DegreeParams, mode: str) -> float:
    if mode == "X":
        return math.sqrt(params.d1) / params.m
    if mode == "M":
        return math.sqrt(params.d1 * (params.d2 - 1)) / params.n
    raise DomainError(f"mode must be 'X' or 'M', got {mode!r}")


def classify_couples(x, y, params: DegreeParams, mode: str = "X") -> CoupleClass:
    """Split index pairs into light (``|x_u y_v| <= threshold``) and heavy couples.

    In ``X`` mode ``y`` is a mean-zero unit vector on the right side; in ``M``
    mode ``y`` is ignored and ``x`` itself must be mean-zero.
    """
    thr = couple_threshold(params, mode)
    x = _unit(x, "x")
    if x.shape[0] != params.n:
        raise DimensionMismatch(f"x has length {x.shape[0]}, expected {params.n}")
    if mode == "X":
        y = _unit(y, "y")
        if y.shape[0] != params.m:
            raise DimensionMismatch(f"y has length {y.shape[0]}, expected {params.m}")
        _mean_zero(y, "y")
    else:
        _mean_zero(x, "x")
        y = x
    P = np.outer(x, y)
    light = np.abs(P) <= thr
    return CoupleClass(mode, thr, light, ~light, light & (P >= 0), light & (P < 0))


def light_mean_check(x, y, params: DegreeParams) -> tuple[float, bool]:
    """Expected light part ``(d1/m) sum_light x_u y_v`` and whether it is at most ``sqrt(d1)``."""
    cc = classify_couples(x, y, params, "X")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    P = np.outer(x, y)
    value = params.d1 / params.m * float(P[cc.light].sum())
    return value, abs(value) <= math.sqrt(params.d1)


def split_bilinear(g: BiregularGraph, x, y) -> tuple[float, float]:
    """``(light, heavy)`` parts of ``<x, X y>``."""
    cc = classify_couples(x, y, g.params, "X")
    W = np.outer(x, y) * g.matrix
    return float(W[cc.light].sum()), float(W[cc.heavy].sum())


# --- Monte Carlo / exact comparison reports -----------------------------------


@dataclass(frozen=True)
class TailRecord:
    t: float
    which: str
    empirical: float
    bound: float
    flag: bool
    stderr: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def monte_carlo_tail(params: DegreeParams, Q, mode: str, sampler, trials: int, t_grid,
                     *, a: float | None = None, which: Sequence[str] = WHICH) -> list[TailRecord]:
    """Compare empirical deviation frequencies against the bounds.

    ``sampler`` is either an enumerated family (exact mode: every member once)
    or a callable ``sampler(trials) -> sequence of graphs``. Exact mode flags any
    frequency above the bound; sampled mode allows three binomial standard errors.
    """
    Q = np.asarray(Q, dtype=np.float64)
    a = float(Q.max()) if a is None else float(a)
    if a <= 0:
        a = 1.0
    cp = conc_params(params, Q, mode)
    exact = not callable(sampler)
    if exact:
        values = family_statistics(sampler, Q, mode)
    else:
        graphs = sampler(trials)
        values = np.array([eval_statistic(g, Q, mode) for g in graphs])
    N = len(values)
    out = []
    for w in which:
        for t in t_grid:
            freq = float(deviation_event(values, cp, float(t), w).mean())
            bound = tail_bound(cp, a, float(t), w)
            se = 0.0 if exact else math.sqrt(max(bound * (1 - bound), 1.0 / N) / N)
            flag = freq > bound + 3 * se
            out.append(TailRecord(float(t), w, freq, bound, bool(flag), se))
    return out


def tail_records_json(records: Sequence[TailRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True)


def tail_records_csv(records: Sequence[TailRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["which", "t", "empirical", "bound", "stderr", "flag"])
    for r in records:
        w.writerow([r.which, repr(r.t), repr(r.empirical), repr(r.bound), repr(r.stderr), int(r.flag)])
    return buf.getvalue()


def random_rational_q(rng: np.random.Generator, shape, denom: int = 10, symmetric: bool = False):
    """Object array of Fractions ``k/denom`` in ``[0, 1]``; symmetric zero-diagonal when asked."""
    k = rng.integers(0, denom + 1, size=shape)
    if symmetric:
        k = np.triu(k, 1)
        k = k + k.T
    Q = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape):
        Q[idx] = Fraction(int(k[idx]), denom)
    return Q
