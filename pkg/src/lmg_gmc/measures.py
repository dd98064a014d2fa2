"""Genuine multipartite correlations of permutation-symmetric pure states.

For a symmetric state the closest product of clusters of at most ``k`` spins is
the product of its own marginals, so the distance reduces to block entropies::

    S^{k->N} = floor(N/k) S(rho_k) + [N mod k != 0] S(rho_{N mod k}) - S(rho_N)
    S^k      = S^{k-1->N} - S^{k->N}

Entropies are in bits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .reduced import ReducedDensity, block_spectrum
from .symmetric import DickeVector

log = logging.getLogger(__name__)

TRACE_TOL = 1e-8
SUM_RULE_TOL = 1e-8
NEGATIVE_TOL = 1e-9


def entropy_from_spectrum(eigenvalues: np.ndarray) -> float:
    w = np.asarray(eigenvalues, dtype=float)
    w = w[w > 0.0]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def von_neumann_entropy(rho: ReducedDensity | np.ndarray) -> float:
    if not isinstance(rho, ReducedDensity):
        mat = np.asarray(rho, dtype=float)
        rho = ReducedDensity(mat.shape[0] - 1, mat)
    tr = float(np.trace(rho.matrix))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr!r} deviates from 1")
    return entropy_from_spectrum(rho.eigenvalues())


class BlockEntropies:
    """Lazily computed ``S(rho_k)`` for one state, each block size solved once."""

    def __init__(self, state: DickeVector):
        self.state = state
        self._cache: dict[int, float] = {}

    def __call__(self, k: int) -> float:
        if k == 0:
            return 0.0
        if k not in self._cache:
            self._cache[k] = entropy_from_spectrum(block_spectrum(self.state, k))
        return self._cache[k]


def _entropies(state_or_cache) -> BlockEntropies:
    if isinstance(state_or_cache, BlockEntropies):
        return state_or_cache
    return BlockEntropies(state_or_cache)


def correlations_above_k(state, k: int) -> float:
    """Relative-entropy distance to the nearest product of clusters of size <= k."""
    ent = _entropies(state)
    n = ent.state.n_spins
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    q, r = divmod(n, k)
    value = q * ent(k) - ent(n)
    if r:
        value += ent(r)
    return value


def total_correlations(state) -> float:
    return correlations_above_k(state, 1)


def genuine_k(state, k: int) -> float:
    ent = _entropies(state)
    n = ent.state.n_spins
    if not 2 <= k <= n:
        raise ValueError(f"genuine order k must be in [2, {n}], got {k}")
    return correlations_above_k(ent, k - 1) - correlations_above_k(ent, k)


def correlation_order(state, k: int) -> float:
    """``S^k`` for ``k >= 2`` and the total correlations for ``k = 1``."""
    return total_correlations(state) if k == 1 else genuine_k(state, k)


@dataclass(frozen=True)
class GmcSpectrum:
    n_spins: int
    total: float
    above_k: np.ndarray  # index k - 1 holds S^{k->N}, k = 1..N
    genuine: np.ndarray  # index k - 2 holds S^k, k = 2..N

    def above(self, k: int) -> float:
        return float(self.above_k[k - 1])

    def genuine_at(self, k: int) -> float:
        return float(self.genuine[k - 2])

    def genuine_display(self) -> np.ndarray:
        """Genuine values with roundoff negatives shown as zero."""
        g = self.genuine.copy()
        g[(g < 0) & (g >= -NEGATIVE_TOL)] = 0.0
        return g


def gmc_spectrum(state: DickeVector) -> GmcSpectrum:
    ent = BlockEntropies(state)
    n = state.n_spins
    above = np.array([correlations_above_k(ent, k) for k in range(1, n + 1)])
    genuine = above[:-1] - above[1:]
    total = float(above[0])
    mismatch = abs(genuine.sum() - total)
    if mismatch > SUM_RULE_TOL:
        raise ArithmeticError(f"sum rule violated by {mismatch:.3e}")
    worst = genuine.min(initial=0.0)
    if worst < -NEGATIVE_TOL:
        log.warning("negative genuine correlation %.3e for N=%d", worst, n)
    return GmcSpectrum(n, total, above, genuine)
