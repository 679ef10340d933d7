"""Generalized Dicke-Kerr model parameters and the per-sector tridiagonal blocks.

The model Hamiltonian (units of hbar, frame rotating with the field) is

    H = delta*Jz + kappa*n**2 + gamma*Jz**2 + lam*(a J+ + a^dag J-)

Collective Dicke states are labelled by an integer ``m = j + N/2`` in ``0..N``
so odd ``N`` never needs half-integer arithmetic.  The ladder transform maps a
product state with ``p`` photons and Dicke index ``m`` to sector ``s = p + m``;
within a sector the transformed Hamiltonian is real symmetric tridiagonal in
``m`` and has dimension ``min(s, N) + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "SectorMatrix",
    "sector_dim",
    "f_diag",
    "g_offdiag",
    "build_sector",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the Dicke-Kerr Hamiltonian.

    All frequencies share one angular-frequency unit (the CLI uses units of
    the coupling).  Instances are hashable and used as cache keys.
    """

    n_qubits: int
    detuning: float = 0.0
    kerr: float = 0.0
    qubit_qubit: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits:
            raise ValueError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        for name in ("detuning", "kerr", "qubit_qubit", "coupling"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def replace(self, **changes) -> "ModelParams":
        fields = dict(
            n_qubits=self.n_qubits,
            detuning=self.detuning,
            kerr=self.kerr,
            qubit_qubit=self.qubit_qubit,
            coupling=self.coupling,
        )
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class SectorMatrix:
    """Symmetric tridiagonal block of the transformed Hamiltonian.

    ``diag[i]`` is the energy of Dicke index ``m = i``; ``offdiag[i]`` couples
    ``m = i`` and ``m = i + 1``.
    """

    s: int
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.dim > 1:
            idx = np.arange(self.dim - 1)
            out[idx, idx + 1] = self.offdiag
            out[idx + 1, idx] = self.offdiag
        return out

    def norm(self) -> float:
        """Cheap upper bound on the spectral radius (max absolute row sum)."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def leading_minor(self, k: int) -> "SectorMatrix":
        """The leading ``k x k`` principal sub-block (lowest Dicke indices)."""
        if not 1 <= k <= self.dim:
            raise ValueError(f"minor size {k} outside 1..{self.dim}")
        return SectorMatrix(self.s, self.diag[:k].copy(), self.offdiag[: k - 1].copy())


def sector_dim(s: int, n_qubits: int) -> int:
    if s < 0:
        raise ValueError(f"sector label must be >= 0, got {s}")
    return min(s, n_qubits) + 1


def f_diag(m: int, s: int, params: ModelParams) -> float:
    """Diagonal energy of Dicke index ``m`` inside sector ``s``.

    Equals ``kerr * p**2 + j*(detuning + qubit_qubit*j)`` where ``p = s - m`` is
    the photon number of that component and ``j = m - N/2``.
    """
    if s < 0 or not 0 <= m <= min(s, params.n_qubits):
        raise ValueError(f"Dicke index m={m} outside sector s={s} (N={params.n_qubits})")
    j = m - params.n_qubits / 2
    p = s - m
    return params.kerr * p * p + j * (params.detuning + params.qubit_qubit * j)


def g_offdiag(m: int, s: int, params: ModelParams) -> float:
    """Coupling between Dicke indices ``m - 1`` and ``m`` inside sector ``s``.

    The angular-momentum factor ``N/2(N/2+1) - j(j-1)`` simplifies to
    ``m(N + 1 - m)`` and the photon factor to ``s + 1 - m``; a non-positive
    photon radicand gives exactly zero.
    """
    n = params.n_qubits
    if not 1 <= m <= n + 1:
        raise ValueError(f"coupling index m={m} outside 1..{n + 1}")
    if s < 0:
        raise ValueError(f"sector label must be >= 0, got {s}")
    photons = s + 1 - m
    if photons <= 0:
        return 0.0
    return params.coupling * math.sqrt(m * (n + 1 - m)) * math.sqrt(photons)


def build_sector(s: int, params: ModelParams) -> SectorMatrix:
    d = sector_dim(s, params.n_qubits)
    n = params.n_qubits
    m = np.arange(d, dtype=np.float64)
    j = m - n / 2
    p = s - m
    diag = params.kerr * p * p + j * (params.detuning + params.qubit_qubit * j)
    mu = m[1:]
    offdiag = params.coupling * np.sqrt(mu * (n + 1 - mu)) * np.sqrt(s + 1 - mu)
    return SectorMatrix(s, diag, offdiag)
