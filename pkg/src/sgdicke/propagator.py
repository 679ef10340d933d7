"""Time evolution through the sector decomposition.

``U(t) = T exp(-i t H_SC) T^dag``: gather each occupied sector of the state,
rotate it with that sector's spectral propagator ``Q exp(-i nu t) Q^T`` and
scatter it back.  Sectors never exchange amplitude, so the work splits into
independent tridiagonal problems.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import ModelParams, build_sector
from .transform import AmplitudeTable, TruncationError, gather_sector, scatter_sector
from .tridiag import DEFAULT_TOL, Eigensystem, diagonalize

__all__ = [
    "SectorPropagator",
    "JcKerrParams",
    "sector_eigensystem",
    "sector_propagator",
    "evolve",
    "jc_kerr_params",
    "jc_kerr_propagator",
    "SectorEvolution",
    "evolution_series",
]


@dataclass(frozen=True)
class SectorPropagator:
    s: int
    t: float
    U: np.ndarray


@lru_cache(maxsize=512)
def sector_eigensystem(s: int, params: ModelParams, tol: float = DEFAULT_TOL) -> Eigensystem:
    """Cached eigensystem of sector ``s``."""
    return diagonalize(build_sector(s, params), tol)


def sector_propagator(eig: Eigensystem, t: float) -> SectorPropagator:
    if t == 0:
        return SectorPropagator(eig.s, 0.0, np.eye(eig.dim, dtype=np.complex128))
    q = eig.vectors
    U = (q * eig.phases(t)) @ q.T
    return SectorPropagator(eig.s, float(t), U)


def _real_matvec(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    # keeps the real matrix real instead of upcasting it to complex
    return q @ v.real + 1j * (q @ v.imag)


def _map(fn, items, workers: int):
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_closed(state: AmplitudeTable, sectors) -> None:
    # sector s holds p = s photons on its m = 0 row
    if sectors and sectors[-1] > state.p_max:
        raise TruncationError(
            f"sector {sectors[-1]} is not closed in a table with p_max={state.p_max}"
        )


def evolve(
    state: AmplitudeTable, t: float, params: ModelParams, workers: int = 1, tol: float = DEFAULT_TOL
) -> AmplitudeTable:
    """Apply ``exp(-i t H)`` to a pure state.

    Raises ``TruncationError`` if an occupied sector does not fit in the table.
    """
    if state.n_qubits != params.n_qubits:
        raise ValueError("state and params disagree on the number of qubits")
    if t == 0:
        return state.copy()
    sectors = [int(s) for s in state.occupied_sectors()]
    _check_closed(state, sectors)
    out = state.zeros_like()

    def work(s):
        U = sector_propagator(sector_eigensystem(s, params, tol), t).U
        return U @ gather_sector(state, s)

    for s, vec in zip(sectors, _map(work, sectors, workers)):
        scatter_sector(vec, s, out)
    return out


@dataclass(frozen=True)
class JcKerrParams:
    """Closed-form ingredients of a single-qubit sector ``n``."""

    beta: float
    omega: float
    mean_energy: float


def jc_kerr_params(n: int, params: ModelParams) -> JcKerrParams:
    """``beta = delta + kappa(1 - 2n)``, ``Omega = sqrt(beta**2 + 4 n lam**2)``.

    ``mean_energy`` is the average of the two diagonal entries,
    ``kappa(1 + 2n(n-1))/2`` plus the constant ``gamma/4`` that ``Jz**2``
    contributes for one qubit.
    """
    k, d, lam = params.kerr, params.detuning, params.coupling
    beta = d + k * (1 - 2 * n)
    omega = math.sqrt(beta * beta + 4 * n * lam * lam)
    mean = 0.5 * k * (1 + 2 * n * (n - 1)) + 0.25 * params.qubit_qubit
    return JcKerrParams(beta, omega, mean)


def jc_kerr_propagator(n: int, t: float, params: ModelParams) -> np.ndarray:
    """Closed-form ``exp(-i t H_SC)`` of sector ``n`` for one qubit.

    Rows and columns follow the Dicke index: ``m = 0`` (ground, ``n`` photons)
    then ``m = 1`` (excited, ``n - 1`` photons), matching ``build_sector``.
    """
    if params.n_qubits != 1:
        raise ValueError("closed form needs exactly one qubit")
    if n < 1:
        raise ValueError("closed form needs a two-dimensional sector (n >= 1)")
    jk = jc_kerr_params(n, params)
    half = 0.5 * jk.omega * t
    # sin(x)/Omega with the Omega -> 0 limit
    sinc = 0.5 * t * np.sinc(half / np.pi)
    cos = math.cos(half)
    off = 2 * params.coupling * math.sqrt(n)
    # sigma_z is +1 on the excited row (m = 1)
    U = np.array(
        [
            [cos + 1j * jk.beta * sinc, -1j * off * sinc],
            [-1j * off * sinc, cos - 1j * jk.beta * sinc],
        ],
        dtype=np.complex128,
    )
    return np.exp(-1j * jk.mean_energy * t) * U


class SectorEvolution:
    """Reusable spectral data for evolving one initial state to many times.

    Each occupied sector is diagonalised once; the state at time ``t`` is
    ``Q (exp(-i nu t) * Q^T v0)`` per sector.
    """

    def __init__(
        self, state0: AmplitudeTable, params: ModelParams, workers: int = 1, tol: float = DEFAULT_TOL
    ):
        if state0.n_qubits != params.n_qubits:
            raise ValueError("state and params disagree on the number of qubits")
        self.state0 = state0
        self.params = params
        self.sectors = [int(s) for s in state0.occupied_sectors()]
        _check_closed(state0, self.sectors)

        def prep(s):
            eig = diagonalize(build_sector(s, params), tol)
            coeff = eig.vectors.T @ gather_sector(state0, s)
            return eig, coeff

        self._data = _map(prep, self.sectors, workers)

    def state(self, t: float) -> AmplitudeTable:
        if t == 0:
            return self.state0.copy()
        out = self.state0.zeros_like()
        for s, (eig, coeff) in zip(self.sectors, self._data):
            vec = _real_matvec(eig.vectors, eig.phases(t) * coeff)
            scatter_sector(vec, s, out)
        return out

    def __call__(self, t: float) -> AmplitudeTable:
        return self.state(t)


def evolution_series(state0: AmplitudeTable, times, params: ModelParams, workers: int = 1):
    """States at each of ``times`` (ascending), sharing one diagonalisation."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted ascending")
    evo = SectorEvolution(state0, params, workers)
    return [evo.state(float(t)) for t in times]
