"""Full 2^N reference: Pauli-basis Hamiltonian, explicit partial traces.

Test-harness code. It shares nothing with the Dicke-basis path except the
conventions: tensor factor ``i`` is spin ``i``, basis bit 1 is an excitation
and carries sigma_z = +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce as _fold
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .symmetric import DickeVector, ModelParams

MAX_SPINS = 12
MAX_GMC_SPINS = 10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class FullState:
    n_spins: int
    amplitudes: np.ndarray
    energy: float


def _site_operator(ops: dict[int, np.ndarray], n: int) -> sp.csr_matrix:
    factors = [sp.csr_matrix(ops.get(i, IDENTITY)) for i in range(n)]
    return _fold(lambda a, b: sp.kron(a, b, format="csr"), factors)


def full_hamiltonian(params: ModelParams) -> np.ndarray:
    n = params.n_spins
    if n > MAX_SPINS:
        raise ValueError(f"oracle is capped at N={MAX_SPINS}, got {n}")
    lam, gamma, h = params.coupling, params.gamma, params.field
    dim = 2**n
    ham = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            ham -= (lam / n) * _site_operator({i: SIGMA_X, j: SIGMA_X}, n)
            ham -= (lam / n) * gamma * _site_operator({i: SIGMA_Y, j: SIGMA_Y}, n)
        ham -= h * _site_operator({i: SIGMA_Z}, n)
    ham = ham.toarray()
    assert np.abs(ham.imag).max() == 0.0
    return ham.real


def _popcount_parity(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.array([bin(i).count("1") % 2 for i in idx])


def oracle_ground_state(params: ModelParams) -> FullState:
    """Lowest state of the full Hamiltonian, diagonalized per excitation-parity sector.

    Exact or near ties between sectors go to the even sector.
    """
    n = params.n_spins
    ham = full_hamiltonian(params)
    parity = _popcount_parity(n)
    best = []
    for p in (0, 1):
        sel = np.flatnonzero(parity == p)
        w, v = np.linalg.eigh(ham[np.ix_(sel, sel)])
        vec = np.zeros(2**n)
        vec[sel] = v[:, 0]
        best.append((float(w[0]), vec))
    (e0, v0), (e1, v1) = best
    if e1 < e0 - 1e-12 * max(abs(e0), abs(e1)):
        energy, vec = e1, v1
    else:
        energy, vec = e0, v0
    return FullState(n, vec, energy)


def embed_dicke(state: DickeVector) -> np.ndarray:
    """Expand a Dicke-basis vector over the 2^N computational basis."""
    n = state.n_spins
    out = np.zeros(2**n)
    for idx in range(2**n):
        ne = bin(idx).count("1")
        out[idx] = state.amplitudes[ne] / math.sqrt(math.comb(n, ne))
    return out


def partial_trace(psi: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Reduced density matrix of the spins in ``keep`` (in the given order)."""
    keep = list(keep)
    traced = [i for i in range(n) if i not in keep]
    tensor = np.asarray(psi).reshape((2,) * n)
    tensor = np.transpose(tensor, keep + traced).reshape(2 ** len(keep), -1)
    return tensor @ tensor.conj().T


def entropy_bits(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def contiguous_partition(n: int, k: int) -> list[list[int]]:
    return [list(range(s, min(s + k, n))) for s in range(0, n, k)]


def distance_for_partition(psi: np.ndarray, n: int, blocks: Sequence[Sequence[int]],
                           global_entropy: float | None = None) -> float:
    """Sum of block entropies minus the global entropy, all from explicit partial traces."""
    if global_entropy is None:
        global_entropy = entropy_bits(np.outer(psi, psi.conj()))
    total = sum(entropy_bits(partial_trace(psi, b, n)) for b in blocks)
    return total - global_entropy


def oracle_above_k(psi: np.ndarray, n: int, k: int,
                   global_entropy: float | None = None) -> float:
    if n > MAX_GMC_SPINS:
        raise ValueError(f"oracle GMC is capped at N={MAX_GMC_SPINS}, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return distance_for_partition(psi, n, contiguous_partition(n, k), global_entropy)


def oracle_gmc_vector(psi: np.ndarray, n: int, k: int) -> float:
    """Genuine order-k correlation of an explicit 2^N vector (k = 1 gives the total)."""
    if k == 1:
        return oracle_above_k(psi, n, 1)
    return oracle_above_k(psi, n, k - 1) - oracle_above_k(psi, n, k)


def oracle_gmc(params: ModelParams, k: int) -> float:
    if params.n_spins > MAX_GMC_SPINS:
        raise ValueError(f"oracle GMC is capped at N={MAX_GMC_SPINS}, got {params.n_spins}")
    gs = oracle_ground_state(params)
    return oracle_gmc_vector(gs.amplitudes, params.n_spins, k)


@dataclass
class OracleCase:
    n_spins: int
    gamma: float
    field: float
    energy_error: float
    gmc_error: float | None
    worst_k: int | None
    passed: bool


def equivalence_suite(n_values=range(2, 11), gammas=(0.0, 0.5, 1.0),
                      fields=(0.0, 0.5, 1.0, 1.5, 2.0), gmc: bool = True,
                      energy_tol: float = 1e-9, gmc_tol: float = 1e-8,
                      perturb: float = 0.0) -> list[OracleCase]:
    """Compare the Dicke-basis pipeline against the full-space oracle.

    ``perturb`` is added to every Dicke-basis quantity; it exists so the
    failure path can be exercised.
    """
    from .measures import gmc_spectrum
    from .symmetric import ground_state

    cap = MAX_GMC_SPINS if gmc else MAX_SPINS
    if max(n_values) > cap:
        raise ValueError(f"oracle check is capped at N={cap}"
                         + (" with GMC enabled" if gmc else ""))
    cases = []
    for n in n_values:
        for gamma in gammas:
            for h in fields:
                params = ModelParams(n, gamma, h)
                fast = ground_state(params)
                ref = oracle_ground_state(params)
                e_err = abs(fast.energy + perturb - ref.energy)
                g_err, worst_k = None, None
                if gmc:
                    spec = gmc_spectrum(fast.vector)
                    s_glob = entropy_bits(np.outer(ref.amplitudes, ref.amplitudes))
                    above = [oracle_above_k(ref.amplitudes, n, k, s_glob)
                             for k in range(1, n + 1)]
                    errs = [abs(spec.above(k) + perturb - above[k - 1])
                            for k in range(1, n + 1)]
                    errs += [abs(spec.genuine_at(k) + perturb - (above[k - 2] - above[k - 1]))
                             for k in range(2, n + 1)]
                    g_err = max(errs)
                    worst_k = 1 + int(np.argmax(errs[:n])) if max(errs[:n]) == g_err \
                        else 2 + int(np.argmax(errs[n:]))
                passed = e_err <= energy_tol and (g_err is None or g_err <= gmc_tol)
                cases.append(OracleCase(n, gamma, h, e_err, g_err, worst_k, passed))
    return cases
