"""Genuine multipartite correlations in the Lipkin-Meshkov-Glick ground state."""

from .criticality import (FssFit, SweepCurve, admissible_sizes, differentiate, fss_fit,
                          h_min_trend, locate_h_min, run_fss, sweep)
from .measures import (GmcSpectrum, correlations_above_k, genuine_k, gmc_spectrum,
                       total_correlations, von_neumann_entropy)
from .reduced import ReducedDensity, log_binomial, reduce
from .symmetric import (BandedHamiltonian, DickeVector, GroundState, ModelParams,
                        build_hamiltonian, ground_state)

__version__ = "0.1.0"

__all__ = [
    "BandedHamiltonian", "DickeVector", "FssFit", "GmcSpectrum", "GroundState",
    "ModelParams", "ReducedDensity", "SweepCurve", "admissible_sizes", "build_hamiltonian",
    "correlations_above_k", "differentiate", "fss_fit", "genuine_k", "gmc_spectrum",
    "ground_state", "h_min_trend", "locate_h_min", "log_binomial", "reduce", "run_fss",
    "sweep", "total_correlations", "von_neumann_entropy",
]
