"""Exact dynamics of the generalized Dicke-Kerr model by excitation sectors.

The Hamiltonian ``delta Jz + kappa n**2 + gamma Jz**2 + lam(a J+ + a^dag J-)``
conserves ``n + Jz``.  Relabelling each product state ``|p>|m>`` by
``s = p + m`` turns it into independent symmetric tridiagonal blocks that are
diagonalised with Sturm bisection and inverse iteration.
"""
__version__ = "0.1.0"

from .model import ModelParams, SectorMatrix, build_sector, f_diag, g_offdiag, sector_dim
from .transform import (
    AmplitudeTable,
    TruncationError,
    coherent_state,
    fock_dicke_state,
    gather_sector,
    lift,
    lower,
    scatter_sector,
)
from .tridiag import (
    CharPolySequence,
    Eigensystem,
    charpoly_eval,
    diagonalize,
    eigenvalues_bisect,
    eigenvector,
    sturm_count,
)
from .propagator import (
    SectorEvolution,
    evolution_series,
    evolve,
    jc_kerr_propagator,
    sector_eigensystem,
    sector_propagator,
)
from .observables import (
    QGrid,
    entropy,
    husimi_q,
    mean_photon,
    observable_series,
    population_inversion,
    purity_deficit,
    q_peaks,
    reduced_ensemble,
    reduced_field,
)
from .rabi import RabiParams, SingularMappingError, critical_coupling, effective_params
