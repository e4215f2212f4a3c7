"""Random biregular graphs: a deterministic seed graph, the 2x2 switch chain, and pairing rejection.

The chain is lazy: each step draws an ordered pair of edges uniformly (with
replacement) and swaps their endpoints when the result is simple, otherwise
does nothing. The proposal is symmetric, so the uniform distribution is
stationary. Edge indices are drawn up front from a numpy PCG64 stream and fed
to a compiled kernel, which keeps runs reproducible from the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ParamInconsistency, RegimeRefused, RejectionBudgetExceeded
from .graph_core import BiregularGraph, DegreeParams, _from_row_sets

RNG_ALGORITHM = "PCG64"
PROPOSAL = "Rectangle2x2"
# refuse pairing rejection when the expected acceptance rate falls below this
MIN_ACCEPTANCE = 1e-4
_CHUNK = 1 << 21  # index pairs drawn per batch


def _params(params) -> DegreeParams:
    return params if isinstance(params, DegreeParams) else DegreeParams(*params)


def default_burn_in(params) -> int:
    """``ceil(20 |E| ln |E|)``, at least 1."""
    E = _params(params).num_edges
    return max(1, math.ceil(20 * E * math.log(E))) if E > 1 else 1


@dataclass(frozen=True)
class ChainConfig:
    burn_in_steps: int | None = None  # None: default_burn_in(params)
    rng_seed: int = 0
    proposal: str = PROPOSAL

    def __post_init__(self):
        if self.burn_in_steps is not None and self.burn_in_steps < 1:
            raise ParamInconsistency("burn_in_steps must be at least 1")
        if self.proposal != PROPOSAL:
            raise ParamInconsistency(f"only the {PROPOSAL} proposal is implemented")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise ParamInconsistency("rng_seed must fit in 64 bits")

    def steps_for(self, params) -> int:
        return self.burn_in_steps if self.burn_in_steps is not None else default_burn_in(params)


def initial_graph(params) -> BiregularGraph:
    """Circulant graph: left vertex ``u`` joins columns ``(u*d1 + k) mod m`` for ``k < d1``."""
    params = _params(params)
    n, m, d1 = params.n, params.m, params.d1
    rows = [{(u * d1 + k) % m for k in range(d1)} for u in range(n)]
    return _from_row_sets(params, rows)


# --- compiled kernel ---------------------------------------------------------------


@numba.njit(cache=True)
def _run_chain(A, eu, ev, idx):
    """Apply the lazy switch steps encoded by ``idx`` (shape (k, 2)); returns accepted count."""
    acc = 0
    for s in range(idx.shape[0]):
        i = idx[s, 0]
        j = idx[s, 1]
        u1 = eu[i]
        v1 = ev[i]
        u2 = eu[j]
        v2 = ev[j]
        if u1 != u2 and v1 != v2 and A[u1, v2] == 0 and A[u2, v1] == 0:
            A[u1, v1] = 0
            A[u2, v2] = 0
            A[u1, v2] = 1
            A[u2, v1] = 1
            ev[i] = v2
            ev[j] = v1
            acc += 1
    return acc


@numba.njit(cache=True)
def _run_batch(A0, eu, ev0, idx, out):
    """Independent chains from the same start; ``idx`` has shape (chains, steps, 2)."""
    acc = 0
    for c in range(idx.shape[0]):
        A = A0.copy()
        ev = ev0.copy()
        acc += _run_chain(A, eu, ev, idx[c])
        out[c] = A
    return acc


def _state(g: BiregularGraph):
    A = g.matrix.astype(np.uint8).copy()
    eu = np.repeat(np.arange(g.n, dtype=np.int64), g.params.d1)
    ev = np.array([v for row in g.row_adj for v in row], dtype=np.int64)
    return A, eu, ev


def _graph_from_dense(params: DegreeParams, A: np.ndarray) -> BiregularGraph:
    rows = [set(np.flatnonzero(A[u]).tolist()) for u in range(params.n)]
    return _from_row_sets(params, rows)


def switch_step(g: BiregularGraph, rng: np.random.Generator) -> BiregularGraph:
    """One lazy 2x2 switch step (reference implementation, not the fast path)."""
    edges = g.edges()
    i, j = rng.integers(0, len(edges), size=2)
    (u1, v1), (u2, v2) = edges[i], edges[j]
    if u1 == u2 or v1 == v2 or g.has_edge(u1, v2) or g.has_edge(u2, v1):
        return g
    rows = [set(r) for r in g.row_adj]
    rows[u1].discard(v1)
    rows[u2].discard(v2)
    rows[u1].add(v2)
    rows[u2].add(v1)
    return _from_row_sets(g.params, rows)


def run_chain(g: BiregularGraph, steps: int, rng: np.random.Generator) -> tuple[BiregularGraph, float]:
    """``steps`` switch steps from ``g`` on the compiled path; returns (graph, accept fraction)."""
    A, eu, ev = _state(g)
    E = len(eu)
    accepted = 0
    done = 0
    while done < steps:
        k = min(_CHUNK, steps - done)
        idx = rng.integers(0, E, size=(k, 2))
        accepted += _run_chain(A, eu, ev, idx)
        done += k
    return _graph_from_dense(g.params, A), accepted / max(steps, 1)


def sample_uniform(params, cfg: ChainConfig | None = None, *, return_stats: bool = False):
    """Initial graph followed by ``cfg`` burn-in steps; deterministic in the seed."""
    params = _params(params)
    cfg = cfg or ChainConfig()
    rng = np.random.default_rng(cfg.rng_seed)
    g, frac = run_chain(initial_graph(params), cfg.steps_for(params), rng)
    if return_stats:
        return g, {"accept_fraction": frac, "burn_in": cfg.steps_for(params), "seed": cfg.rng_seed,
                   "rng": RNG_ALGORITHM, "proposal": cfg.proposal}
    return g


def sample_many_matrices(params, count: int, cfg: ChainConfig | None = None) -> np.ndarray:
    """``count`` independent chain outputs as a ``(count, n, m)`` uint8 array.

    Every chain starts from the initial graph and runs the full burn-in; their
    index streams are consecutive blocks of one generator seeded by ``cfg``.
    """
    params = _params(params)
    cfg = cfg or ChainConfig()
    steps = cfg.steps_for(params)
    rng = np.random.default_rng(cfg.rng_seed)
    A0, eu, ev0 = _state(initial_graph(params))
    E = len(eu)
    out = np.empty((count, params.n, params.m), dtype=np.uint8)
    per = max(1, _CHUNK // max(steps, 1))
    start = 0
    while start < count:
        c = min(per, count - start)
        idx = rng.integers(0, E, size=(c, steps, 2))
        _run_batch(A0, eu, ev0, idx, out[start:start + c])
        start += c
    return out


def sample_many(params, count: int, cfg: ChainConfig | None = None) -> list[BiregularGraph]:
    params = _params(params)
    return [_graph_from_dense(params, A) for A in sample_many_matrices(params, count, cfg)]


# --- pairing model with rejection ------------------------------------------------------


def expected_acceptance(params) -> float:
    """Asymptotic probability that a random pairing is simple: ``exp(-(d1-1)(d2-1)/2)``."""
    p = _params(params)
    return math.exp(-(p.d1 - 1) * (p.d2 - 1) / 2)


def _complete(params: DegreeParams) -> bool:
    return params.d1 == params.m


def sample_rejection_matrices(params, count: int, rng: np.random.Generator, *,
                              max_attempts: int = 10_000_000, batch: int = 4096) -> np.ndarray:
    """``count`` exact-uniform samples from the pairing model conditioned on simplicity."""
    params = _params(params)
    n, m, d1, d2 = params.as_tuple()
    if _complete(params):
        return np.ones((count, n, m), dtype=np.uint8)
    if expected_acceptance(params) < MIN_ACCEPTANCE:
        raise RegimeRefused(
            f"pairing rejection for {params} accepts with probability ~{expected_acceptance(params):.2e}"
        )
    left = np.repeat(np.arange(n, dtype=np.int64), d1)
    right = np.repeat(np.arange(m, dtype=np.int64), d2)
    E = len(left)
    out = np.empty((count, n, m), dtype=np.uint8)
    got = 0
    attempts = 0
    while got < count:
        if attempts >= max_attempts:
            raise RejectionBudgetExceeded(f"{attempts} pairings tried, {got} of {count} accepted")
        b = min(batch, max_attempts - attempts)
        perm = rng.permuted(np.broadcast_to(right, (b, E)), axis=1)
        codes = np.sort(left * m + perm, axis=1)
        simple = (np.diff(codes, axis=1) != 0).all(axis=1)
        attempts += b
        for k in np.flatnonzero(simple):
            if got == count:
                break
            A = np.zeros(n * m, dtype=np.uint8)
            A[codes[k]] = 1
            out[got] = A.reshape(n, m)
            got += 1
    return out


def sample_rejection(params, rng: np.random.Generator, *, max_attempts: int = 10_000_000) -> BiregularGraph:
    params = _params(params)
    A = sample_rejection_matrices(params, 1, rng, max_attempts=max_attempts)[0]
    return _graph_from_dense(params, A)


def matrix_keys(mats: np.ndarray) -> list[tuple[int, ...]]:
    """Row-bitmask keys (column 0 most significant) for a stack of 0/1 matrices."""
    m = mats.shape[-1]
    if m > 62:
        weights = [1 << (m - 1 - v) for v in range(m)]
        return [tuple(sum(w for w, x in zip(weights, row) if x) for row in A) for A in mats]
    w = (1 << np.arange(m - 1, -1, -1, dtype=np.int64))
    codes = mats.astype(np.int64) @ w
    return [tuple(r) for r in codes.tolist()]
