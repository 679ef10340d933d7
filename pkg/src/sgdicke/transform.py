"""Ladder (Susskind-Glogower) transform as index arithmetic on amplitude tables.

The right-unitary transform ``T = sum_j V^(N/2+j) |j><j|`` shifts the photon
number of the component with Dicke index ``m`` by ``m``.  Its adjoint sends the
physical product state ``|p>|m>`` to ``|s = p + m>|m>``; ``T`` sends it back.
No operator matrices are ever formed: gathering a sector reads the anti-
diagonal ``p + m = s`` of the amplitude table and scattering writes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

__all__ = [
    "TruncationError",
    "AmplitudeTable",
    "lift",
    "lower",
    "gather_sector",
    "scatter_sector",
    "photon_cutoff",
    "coherent_amplitudes",
    "coherent_state",
    "fock_dicke_state",
]


class TruncationError(ValueError):
    """Raised when amplitude would leave the retained photon range."""


@dataclass
class AmplitudeTable:
    """Pure state amplitudes ``c[p, m]`` over photon number and Dicke index."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != self.n_qubits + 1:
            raise ValueError(
                f"amplitude table must have shape (p_max + 1, {self.n_qubits + 1}), "
                f"got {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        self.amplitudes = amps

    @property
    def p_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def s_max(self) -> int:
        return self.p_max + self.n_qubits

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def copy(self) -> "AmplitudeTable":
        return AmplitudeTable(self.n_qubits, self.amplitudes.copy())

    def zeros_like(self) -> "AmplitudeTable":
        return AmplitudeTable(self.n_qubits, np.zeros_like(self.amplitudes))

    def padded(self, p_max: int) -> "AmplitudeTable":
        """Same state in a table holding photon numbers up to ``p_max``."""
        if p_max < self.p_max:
            if np.any(self.amplitudes[p_max + 1 :] != 0):
                raise TruncationError(f"cannot shrink to p_max={p_max}: amplitude would be lost")
            return AmplitudeTable(self.n_qubits, self.amplitudes[: p_max + 1].copy())
        out = np.zeros((p_max + 1, self.n_qubits + 1), dtype=np.complex128)
        out[: self.p_max + 1] = self.amplitudes
        return AmplitudeTable(self.n_qubits, out)

    def occupied_sectors(self) -> np.ndarray:
        """Sorted sector labels carrying nonzero amplitude."""
        p, m = np.nonzero(self.amplitudes)
        return np.unique(p + m)

    def required_p_max(self) -> int:
        """Smallest ``p_max`` that keeps every occupied sector closed."""
        sectors = self.occupied_sectors()
        return int(sectors[-1]) if sectors.size else 0

    def to_vector(self) -> np.ndarray:
        """Flatten with photon number major and Dicke index minor."""
        return self.amplitudes.reshape(-1).copy()

    @classmethod
    def from_vector(cls, vec, n_qubits: int) -> "AmplitudeTable":
        vec = np.asarray(vec, dtype=np.complex128)
        return cls(n_qubits, vec.reshape(-1, n_qubits + 1).copy())


def lift(p: int, m: int, n_qubits: int | None = None) -> tuple[int, int]:
    """Physical ``(p, m)`` to sector coordinates ``(s, row)``."""
    if p < 0 or m < 0 or (n_qubits is not None and m > n_qubits):
        raise ValueError(f"invalid physical index (p={p}, m={m})")
    return p + m, m


def lower(s: int, row: int, n_qubits: int) -> tuple[int, int]:
    """Sector coordinates back to the physical ``(p, m)``.

    Rows beyond ``min(s, N)`` lie in the kernel of the transform and have no
    physical counterpart.
    """
    if s < 0 or not 0 <= row <= min(s, n_qubits):
        raise ValueError(f"row {row} outside sector s={s} (N={n_qubits})")
    return s - row, row


def _sector_rows(s: int, n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.arange(min(s, n_qubits) + 1)
    return s - rows, rows


def gather_sector(state: AmplitudeTable, s: int) -> np.ndarray:
    p, rows = _sector_rows(s, state.n_qubits)
    out = np.zeros(rows.size, dtype=np.complex128)
    keep = p <= state.p_max
    out[keep] = state.amplitudes[p[keep], rows[keep]]
    return out


def scatter_sector(vector, s: int, state: AmplitudeTable) -> AmplitudeTable:
    """Write ``vector`` onto sector ``s`` of ``state`` in place and return it.

    Components whose photon number exceeds the table are allowed only if they
    are exactly zero.
    """
    vector = np.asarray(vector)
    p, rows = _sector_rows(s, state.n_qubits)
    if vector.shape != rows.shape:
        raise ValueError(f"sector {s} needs a vector of length {rows.size}, got {vector.shape}")
    keep = p <= state.p_max
    if np.any(vector[~keep] != 0):
        raise TruncationError(
            f"sector {s} reaches photon number {int(p[~keep][0])} > p_max={state.p_max}"
        )
    state.amplitudes[p[keep], rows[keep]] = vector[keep]
    return state


def photon_cutoff(alpha: complex) -> int:
    """Photon cutoff leaving a Poisson tail below 1e-12 for ``|alpha>``."""
    r = abs(alpha)
    return int(math.ceil(r * r + 10 * r + 10))


def coherent_amplitudes(alpha: complex, p_max: int) -> np.ndarray:
    """Fock amplitudes ``<p|alpha>`` for ``p = 0..p_max`` via log-factorials."""
    p = np.arange(p_max + 1)
    r = abs(alpha)
    if r == 0:
        out = np.zeros(p_max + 1, dtype=np.complex128)
        out[0] = 1.0
        return out
    log_mag = -0.5 * r * r + p * math.log(r) - 0.5 * gammaln(p + 1)
    return np.exp(log_mag + 1j * p * np.angle(alpha))


def coherent_state(
    alpha: complex, n_qubits: int, m0: int = 0, cutoff: int | None = None
) -> tuple[AmplitudeTable, float]:
    """Product state ``|alpha>_f |m0>`` and the discarded Poisson tail mass.

    The table is sized so every occupied sector is closed (``p_max = cutoff +
    m0``); amplitudes above ``cutoff`` are zero and are not renormalised.
    """
    if not 0 <= m0 <= n_qubits:
        raise ValueError(f"Dicke index m0={m0} outside 0..{n_qubits}")
    if cutoff is None:
        cutoff = photon_cutoff(alpha)
    amps = np.zeros((cutoff + m0 + 1, n_qubits + 1), dtype=np.complex128)
    amps[: cutoff + 1, m0] = coherent_amplitudes(alpha, cutoff)
    tail = float(poisson.sf(cutoff, abs(alpha) ** 2)) if alpha != 0 else 0.0
    return AmplitudeTable(n_qubits, amps), tail


def fock_dicke_state(p: int, m: int, n_qubits: int, p_max: int | None = None) -> AmplitudeTable:
    if p_max is None:
        p_max = p + m
    if not 0 <= m <= n_qubits or not 0 <= p <= p_max:
        raise ValueError(f"invalid basis state (p={p}, m={m})")
    amps = np.zeros((p_max + 1, n_qubits + 1), dtype=np.complex128)
    amps[p, m] = 1.0
    return AmplitudeTable(n_qubits, amps)
