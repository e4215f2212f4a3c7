"""Singular values of X, the second singular value, and lambda(M).

Two independent routes are kept on purpose: dense LAPACK solves, and a Lanczos
iteration on ``X^T X`` restricted to the complement of the all-ones vector
(exact deflation, since ``X 1_m = d1 1_n`` and ``X^T 1_n = d2 1_m``).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceFailure, DomainError, NonSquareParams
from .graph_core import BiregularGraph, adjacency_matrix

DENSE_LIMIT = 2000


def sparse_matrix(g: BiregularGraph) -> sp.csr_matrix:
    """Biadjacency matrix in CSR form (float64)."""
    indptr = np.arange(0, g.n * g.params.d1 + 1, g.params.d1)
    indices = np.fromiter((v for row in g.row_adj for v in row), dtype=np.int64, count=g.n * g.params.d1)
    data = np.ones(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(g.n, g.m))


def singular_values(g: BiregularGraph, method: str = "auto") -> np.ndarray:
    """All ``n`` singular values of X in descending order."""
    if method == "auto":
        method = "dense" if g.n <= DENSE_LIMIT else "gram"
    if method == "dense":
        return np.linalg.svd(g.matrix.astype(np.float64), compute_uv=False)
    if method == "gram":
        # eigenvalues of the sparse-built Gram matrix X X^T
        X = sparse_matrix(g)
        G = (X @ X.T).toarray()
        ev = np.linalg.eigvalsh(G)[::-1]
        return np.sqrt(np.clip(ev, 0, None))
    raise DomainError(f"unknown method {method!r}")


@dataclass
class LanczosResult:
    values: np.ndarray  # Ritz values, descending
    iterations: int
    residual: float
    converged: bool


def lanczos_extremes(matvec: Callable[[np.ndarray], np.ndarray], dim: int, *,
                     project: Callable[[np.ndarray], np.ndarray] | None = None,
                     tol: float = 1e-12, max_iter: int | None = None,
                     rng: np.random.Generator | None = None, which: str = "both") -> LanczosResult:
    """Largest and smallest eigenvalues of a symmetric operator.

    Full reorthogonalisation against every stored Lanczos vector; ``project``
    keeps iterates inside an invariant subspace. Converged when the residual
    bound of the watched Ritz pairs (``which``: "largest" or "both") falls
    below ``tol * max(1, |theta|)``.
    """
    if which not in ("largest", "both"):
        raise DomainError(f"which must be 'largest' or 'both', got {which!r}")
    rng = rng or np.random.default_rng(12345)
    proj = project or (lambda v: v)
    if max_iter is None:
        max_iter = max(50, int(10 * math.sqrt(dim) * math.log(1 / tol)))
    max_iter = min(max_iter, dim)
    q = proj(rng.standard_normal(dim))
    nrm = np.linalg.norm(q)
    if nrm == 0:
        return LanczosResult(np.zeros(1), 0, 0.0, True)
    Q = np.zeros((max_iter + 1, dim))
    Q[0] = q / nrm
    alpha, beta = [], []
    res = math.inf
    theta = np.zeros(1)
    for k in range(max_iter):
        w = proj(matvec(Q[k]))
        a = float(Q[k] @ w)
        alpha.append(a)
        w -= a * Q[k]
        if k:
            w -= beta[-1] * Q[k - 1]
        # two passes of classical Gram-Schmidt against all previous vectors
        for _ in range(2):
            w -= Q[: k + 1].T @ (Q[: k + 1] @ w)
        b = float(np.linalg.norm(w))
        theta, S = eigh_tridiagonal(np.asarray(alpha), np.asarray(beta))
        res = b * (abs(S[-1, -1]) if which == "largest" else max(abs(S[-1, -1]), abs(S[-1, 0])))
        scale = max(1.0, float(np.abs(theta).max()))
        if b <= 1e-13 * scale or res <= tol * scale:
            return LanczosResult(theta[::-1], k + 1, res, True)
        beta.append(b)
        Q[k + 1] = w / b
    # Krylov space exhausted: Ritz values are exact up to rounding
    if max_iter == dim:
        return LanczosResult(theta[::-1], max_iter, res, True)
    return LanczosResult(theta[::-1], max_iter, res, False)


def _center(v: np.ndarray) -> np.ndarray:
    return v - v.mean()


def sigma2_deflated(g: BiregularGraph, tol: float = 1e-10, *, max_iter: int | None = None,
                    return_info: bool = False):
    """Second singular value of X via Lanczos on ``X^T X`` restricted to ``1_m``-perp."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    if g.m == 1:
        return (0.0, None) if return_info else 0.0
    X = sparse_matrix(g)
    XT = X.T.tocsr()
    info = lanczos_extremes(lambda y: XT @ (X @ y), g.m, project=_center,
                            tol=min(tol, 1e-12), max_iter=max_iter, which="largest")
    if not info.converged:
        raise ConvergenceFailure("Lanczos did not converge for sigma_2", info.residual, info.iterations)
    val = math.sqrt(max(float(info.values[0]), 0.0))
    return (val, info) if return_info else val


def sigma2_dense(g: BiregularGraph) -> float:
    s = singular_values(g, "dense")
    return float(s[1]) if len(s) > 1 else 0.0


def sigma2(g: BiregularGraph, tol: float = 1e-10) -> float:
    if g.n <= DENSE_LIMIT:
        return sigma2_dense(g)
    return sigma2_deflated(g, tol)


def _m_matrix(g: BiregularGraph) -> np.ndarray:
    X = g.matrix.astype(np.float64)
    return X @ X.T - g.params.d1 * np.eye(g.n)


def lambda_M(g: BiregularGraph, tol: float = 1e-10, method: str = "auto") -> float:
    """``sup |<x, M x>|`` over unit mean-zero ``x`` with ``M = X X^T - d1 I``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    n = g.n
    if n == 1:
        return 0.0
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "iterative"
    if method == "dense":
        M = _m_matrix(g)
        P = np.eye(n) - np.full((n, n), 1.0 / n)
        ev = np.linalg.eigvalsh(P @ M @ P)
        return float(np.abs(ev).max())
    X = sparse_matrix(g)
    XT = X.T.tocsr()
    d1 = g.params.d1
    info = lanczos_extremes(lambda x: X @ (XT @ x) - d1 * x, n, project=_center, tol=min(tol, 1e-12))
    if not info.converged:
        raise ConvergenceFailure("Lanczos did not converge for lambda(M)", info.residual, info.iterations)
    return float(np.abs(info.values).max())


def lambda_M_from_sigma(sigma: np.ndarray, d1: int) -> float:
    """``max_{i >= 2} |sigma_i^2 - d1|``; equals lambda(M) when X has full row rank."""
    if len(sigma) < 2:
        return 0.0
    return float(np.abs(np.asarray(sigma[1:]) ** 2 - d1).max())


def digraph_sigma2(g: BiregularGraph) -> tuple[float, float]:
    """``(sigma_2, |lambda_2|)`` of a square ``(n, n, d, d)`` biadjacency read as a digraph."""
    n, m, d1, d2 = g.params.as_tuple()
    if n != m or d1 != d2:
        raise NonSquareParams(f"digraph mode needs (n,n,d,d), got {g.params}")
    s2 = sigma2_dense(g)
    ev = np.linalg.eigvals(g.matrix.astype(np.float64))
    mods = np.sort(np.abs(ev))[::-1]
    lam2 = float(mods[1]) if n > 1 else 0.0
    return s2, lam2


def adjacency_spectrum(g: BiregularGraph) -> np.ndarray:
    """Eigenvalues of the full symmetric adjacency matrix, descending."""
    return np.linalg.eigvalsh(adjacency_matrix(g))[::-1]


@dataclass
class SpectralSummary:
    sigma: list[float]
    lambda_A: list[float] | None
    lambda_M: float
    sigma2_iterative: float | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def sigma2(self) -> float:
        return self.sigma[1] if len(self.sigma) > 1 else 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def spectral_summary(g: BiregularGraph, *, with_adjacency: bool | None = None,
                     iterative: bool = False, tol: float = 1e-10) -> SpectralSummary:
    sigma = singular_values(g)
    if with_adjacency is None:
        with_adjacency = g.n + g.m <= DENSE_LIMIT
    lam_A = adjacency_spectrum(g).tolist() if with_adjacency else None
    s2_it, residuals = None, {}
    if iterative:
        s2_it, info = sigma2_deflated(g, tol, return_info=True)
        if info is not None:
            residuals = {"iterations": info.iterations, "residual": info.residual}
    return SpectralSummary(sigma.tolist(), lam_A, lambda_M(g, tol), s2_it, residuals)
