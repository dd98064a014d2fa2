"""Reduced states of k-spin blocks of a permutation-symmetric pure state.

A symmetric state splits across a bipartition into ``L = N - k`` and ``k``
spins through the Schmidt form of Dicke states::

    |N, n> = sum_l sqrt(C(L, l) C(k, n - l) / C(N, n)) |L, l> |k, n - l>

so the coefficient matrix ``A[l, j] = P[l + j] * sqrt(C(L,l) C(k,j) / C(N,l+j))``
holds the whole bipartite state and ``rho_k = A.T @ A``.  Binomial ratios are
formed in log space, which keeps N ~ 500 well inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .symmetric import DickeVector

PSD_TOL = 1e-10


def log_binomial(n: int, r: int) -> float:
    """``ln C(n, r)``; ``-inf`` when ``r`` is outside ``[0, n]``."""
    if r < 0 or r > n:
        return -math.inf
    if r == 0 or r == n:
        return 0.0
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


@lru_cache(maxsize=64)
def _log_binomial_row(n: int) -> np.ndarray:
    r = np.arange(n + 1)
    row = gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1)
    row[0] = row[-1] = 0.0
    row.setflags(write=False)
    return row


@dataclass(frozen=True)
class ReducedDensity:
    block_size: int
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order, drift in ``[-PSD_TOL, 0)`` clamped to zero."""
        w = np.linalg.eigvalsh(self.matrix)
        if w[0] < -PSD_TOL:
            raise ValueError(f"reduced state has eigenvalue {w[0]:.3e} < -{PSD_TOL}")
        return np.clip(w, 0.0, None)


def schmidt_coefficients(state: DickeVector, k: int) -> np.ndarray:
    """Coefficient matrix ``A`` of shape ``(N-k+1, k+1)`` with ``rho_k = A.T @ A``."""
    n = state.n_spins
    if not 1 <= k <= n:
        raise ValueError(f"block size k must be in [1, {n}], got {k}")
    rest = n - k
    l_idx = np.arange(rest + 1)[:, None]
    j_idx = np.arange(k + 1)[None, :]
    tot = l_idx + j_idx
    log_coef = 0.5 * (_log_binomial_row(rest)[l_idx] + _log_binomial_row(k)[j_idx]
                      - _log_binomial_row(n)[tot])
    return state.amplitudes[tot] * np.exp(log_coef)


def reduce(state: DickeVector, k: int) -> ReducedDensity:
    """Reduced density matrix of any ``k`` spins, in the basis ``|k, j>``, j = 0..k."""
    a = schmidt_coefficients(state, k)
    rho = a.T @ a
    rho = 0.5 * (rho + rho.T)
    return ReducedDensity(k, rho)


def block_spectrum(state: DickeVector, k: int) -> np.ndarray:
    """Nonzero-capable spectrum of ``rho_k`` from the smaller Gram matrix of ``A``.

    Same nonzero eigenvalues as ``reduce(state, k).eigenvalues()`` at a cost set
    by ``min(k, N - k)``.
    """
    a = schmidt_coefficients(state, k)
    gram = a.T @ a if a.shape[1] <= a.shape[0] else a @ a.T
    w = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    if w[0] < -PSD_TOL:
        raise ValueError(f"reduced state has eigenvalue {w[0]:.3e} < -{PSD_TOL}")
    return np.clip(w, 0.0, None)
