"""LMG Hamiltonian in the Dicke basis and its ground state.

The collective operators are half-sums of Pauli matrices, so the total spin is
``J = N/2`` and ``M = n_e - N/2`` for the Dicke state with ``n_e`` excitations.
The only off-diagonal couplings come from ``J_+^2`` and ``J_-^2``, which shift
``n_e`` by two; every Hamiltonian therefore splits into an even and an odd
parity block, each of which is tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

SOLVER_VERSION = "tridiag-1"

# relative energy gap below which the two parity sectors count as degenerate
DEGENERACY_RTOL = 1e-12


class SolverError(RuntimeError):
    """Raised when the eigensolver fails or returns an inaccurate vector."""


@dataclass(frozen=True)
class ModelParams:
    n_spins: int
    gamma: float = 0.5
    field: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValueError(f"n_spins must be an integer >= 2, got {self.n_spins!r}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not self.field >= 0.0:
            raise ValueError(f"field must be >= 0, got {self.field!r}")
        if not self.coupling > 0.0:
            raise ValueError(f"coupling must be > 0, got {self.coupling!r}")
        object.__setattr__(self, "n_spins", int(self.n_spins))
        for name in ("gamma", "field", "coupling"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def with_field(self, field: float) -> "ModelParams":
        return ModelParams(self.n_spins, self.gamma, field, self.coupling)


@dataclass(frozen=True)
class DickeVector:
    """Real amplitudes ``P[n_e]`` of a symmetric state over ``|N, n_e>``."""

    n_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.shape != (self.n_spins + 1,):
            raise ValueError(
                f"expected {self.n_spins + 1} amplitudes, got shape {amps.shape}"
            )
        norm = float(amps @ amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "DickeVector":
        amps = np.asarray(amplitudes, dtype=float)
        return cls(len(amps) - 1, amps / np.linalg.norm(amps))

    @classmethod
    def ghz(cls, n_spins: int) -> "DickeVector":
        amps = np.zeros(n_spins + 1)
        amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
        return cls(n_spins, amps)

    @classmethod
    def dicke(cls, n_spins: int, excitations: int) -> "DickeVector":
        amps = np.zeros(n_spins + 1)
        amps[excitations] = 1.0
        return cls(n_spins, amps)


@dataclass(frozen=True)
class BandedHamiltonian:
    n_spins: int
    diagonal: np.ndarray
    second_offdiagonal: np.ndarray

    def dense(self) -> np.ndarray:
        h = np.diag(self.diagonal)
        idx = np.arange(self.n_spins - 1)
        h[idx + 2, idx] = self.second_offdiagonal
        h[idx, idx + 2] = self.second_offdiagonal
        return h

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        out = self.diagonal * vec
        out[2:] += self.second_offdiagonal * vec[:-2]
        out[:-2] += self.second_offdiagonal * vec[2:]
        return out

    def max_abs(self) -> float:
        return float(max(np.abs(self.diagonal).max(),
                         np.abs(self.second_offdiagonal).max(initial=0.0)))

    def parity_block(self, parity: int) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and first off-diagonal of the tridiagonal block with ``n_e % 2 == parity``."""
        return self.diagonal[parity::2].copy(), self.second_offdiagonal[parity::2].copy()


@dataclass(frozen=True)
class GroundState:
    params: ModelParams
    energy: float
    vector: DickeVector
    parity: str
    eigensolve_residual: float


def build_hamiltonian(params: ModelParams) -> BandedHamiltonian:
    n = params.n_spins
    lam, gamma, h = params.coupling, params.gamma, params.field
    j = n / 2.0
    m = np.arange(n + 1) - j
    diagonal = -(lam / n) * (1.0 + gamma) * (j * (j + 1.0) - m**2 - n / 2.0) - 2.0 * h * m
    # <n_e+2| J_+^2 |n_e> = c(M) c(M+1), c(M) = sqrt(J(J+1) - M(M+1))
    m_low = m[:-2]
    c0 = np.sqrt(j * (j + 1.0) - m_low * (m_low + 1.0))
    c1 = np.sqrt(j * (j + 1.0) - (m_low + 1.0) * (m_low + 2.0))
    offdiag = -(lam / (2.0 * n)) * (1.0 - gamma) * c0 * c1
    return BandedHamiltonian(n, diagonal, offdiag)


def _lowest_in_block(diag: np.ndarray, off: np.ndarray) -> tuple[float, np.ndarray]:
    if len(diag) == 1:
        return float(diag[0]), np.ones(1)
    try:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                                lapack_driver="stebz")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal eigensolve failed: {exc}") from exc
    if len(w) != 1 or not np.all(np.isfinite(v)):
        raise SolverError("tridiagonal eigensolve returned no finite eigenpair")
    vec = v[:, 0]
    return float(w[0]), vec / np.linalg.norm(vec)


def ground_state(params: ModelParams) -> GroundState:
    """Lowest eigenpair over both parity sectors; near-ties go to the even sector."""
    ham = build_hamiltonian(params)
    n = params.n_spins
    candidates = []
    for parity in (0, 1):
        energy, block_vec = _lowest_in_block(*ham.parity_block(parity))
        candidates.append((energy, parity, block_vec))
    (e_even, _, v_even), (e_odd, _, v_odd) = candidates
    scale = max(abs(e_even), abs(e_odd), 1e-300)
    if e_odd < e_even - DEGENERACY_RTOL * scale:
        energy, parity, block_vec = candidates[1]
    else:
        energy, parity, block_vec = candidates[0]

    amps = np.zeros(n + 1)
    amps[parity::2] = block_vec
    k = int(np.argmax(np.abs(amps)))
    if amps[k] < 0:
        amps = -amps
    amps /= np.linalg.norm(amps)

    residual = float(np.linalg.norm(ham.matvec(amps) - energy * amps))
    tol = 1e-9 * max(ham.max_abs(), 1.0) * (n + 1)
    if not residual <= tol:
        raise SolverError(
            f"ground state residual {residual:.3e} exceeds {tol:.3e} for {params}"
        )
    return GroundState(params, energy, DickeVector(n, amps),
                       "even" if parity == 0 else "odd", residual)
