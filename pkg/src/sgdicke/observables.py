"""Field and ensemble observables of a pure state.

For a pure global state the field and ensemble reduced density matrices share
their nonzero spectrum, so purity and entropy are computed from whichever
Gram matrix is smaller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.special import gammaln

from .model import ModelParams
from .propagator import SectorEvolution
from .transform import AmplitudeTable

__all__ = [
    "mean_photon",
    "inversion_direct",
    "excitation_number",
    "population_inversion",
    "reduced_field",
    "reduced_ensemble",
    "schmidt_spectrum",
    "purity_deficit",
    "entropy",
    "QGrid",
    "husimi_q",
    "q_peaks",
    "ObservableSeries",
    "observable_series",
    "snapshot_times",
]

_ENTROPY_CUTOFF = 1e-14


def mean_photon(state: AmplitudeTable) -> float:
    weights = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    return float(np.dot(np.arange(state.p_max + 1), weights))


def inversion_direct(state: AmplitudeTable) -> float:
    """``<Jz>`` summed directly over Dicke populations."""
    weights = np.sum(np.abs(state.amplitudes) ** 2, axis=0)
    j = np.arange(state.n_qubits + 1) - state.n_qubits / 2
    return float(np.dot(j, weights))


def excitation_number(state: AmplitudeTable) -> float:
    """``<n + Jz>``, conserved by the dynamics."""
    return mean_photon(state) + inversion_direct(state)


def population_inversion(state: AmplitudeTable, excitation0: float) -> float:
    """``<Jz(t)> = <N(0)> - <n(t)>``."""
    return excitation0 - mean_photon(state)


def reduced_field(state: AmplitudeTable) -> np.ndarray:
    c = state.amplitudes
    return c @ c.conj().T


def reduced_ensemble(state: AmplitudeTable) -> np.ndarray:
    c = state.amplitudes
    return c.T @ c.conj()


def _trim(c: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero(np.any(c != 0, axis=1))
    cols = np.flatnonzero(np.any(c != 0, axis=0))
    if rows.size == 0:
        return c[:1, :1]
    return c[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]


def schmidt_spectrum(state: AmplitudeTable, side: str = "auto") -> np.ndarray:
    """Eigenvalues (descending, clipped at zero) of a reduced density matrix.

    ``side`` selects ``"field"``, ``"ensemble"`` or ``"auto"`` (the smaller
    Gram matrix after dropping empty rows and columns).
    """
    if side == "field":
        rho = reduced_field(state)
    elif side == "ensemble":
        rho = reduced_ensemble(state)
    elif side == "auto":
        c = _trim(state.amplitudes)
        rho = c @ c.conj().T if c.shape[0] <= c.shape[1] else c.T @ c.conj()
    else:
        raise ValueError(f"unknown side {side!r}")
    w = np.linalg.eigvalsh(rho)[::-1]
    return np.clip(w, 0.0, None)


def purity_deficit(state: AmplitudeTable, side: str = "auto") -> float:
    """``1 - Tr rho_f**2``."""
    w = schmidt_spectrum(state, side)
    return float(1.0 - np.sum(w * w))


def entropy(state: AmplitudeTable, side: str = "auto") -> float:
    """Von Neumann entropy of the field (natural log)."""
    w = schmidt_spectrum(state, side)
    w = w[w > _ENTROPY_CUTOFF]
    return float(-np.sum(w * np.log(w)))


@dataclass(frozen=True)
class QGrid:
    """Husimi function sampled on a rectangular grid.

    ``values[i, k]`` is Q at ``re[k] + 1j * im[i]`` (rows follow the imaginary
    axis).
    """

    re: np.ndarray
    im: np.ndarray
    values: np.ndarray

    @property
    def spacing(self) -> float:
        return float((self.re[1] - self.re[0]) * (self.im[1] - self.im[0]))

    def total(self) -> float:
        """Riemann sum of Q over the grid."""
        return float(self.values.sum() * self.spacing)


def _overlaps(points: np.ndarray, p_max: int) -> np.ndarray:
    """``<alpha|p>`` for each grid point (rows) and photon number (columns)."""
    p = np.arange(p_max + 1)
    r = np.abs(points)[:, None]
    theta = np.angle(points)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.log(r)
        log_mag = -0.5 * r * r + p * log_r - 0.5 * gammaln(p + 1)
    # 0 * log(0) for the vacuum term at alpha = 0
    log_mag = np.where((p == 0) & (r == 0), 0.0, log_mag)
    return np.exp(log_mag - 1j * p * theta)


def husimi_q(
    state: AmplitudeTable,
    center: complex = 0.0,
    half_width: float | None = None,
    resolution: int = 101,
) -> QGrid:
    """Field Husimi function ``Q(alpha) = <alpha|rho_f|alpha> / pi``.

    The default window is centred on ``center`` with half-width
    ``|center| + 4`` or enough to hold the mean photon number, whichever is
    larger.
    """
    if half_width is None:
        half_width = max(abs(center) + 4.0, math.sqrt(mean_photon(state)) + 4.0)
    re = np.linspace(center.real - half_width, center.real + half_width, resolution)
    im = np.linspace(center.imag - half_width, center.imag + half_width, resolution)
    points = (re[None, :] + 1j * im[:, None]).ravel()
    c = state.amplitudes
    rows = np.flatnonzero(np.any(c != 0, axis=1))
    p_top = int(rows[-1]) if rows.size else 0
    c = c[: p_top + 1]
    w = _overlaps(points, p_top)
    if c.shape[1] <= c.shape[0]:
        proj = w @ c
        vals = np.sum(np.abs(proj) ** 2, axis=1)
    else:
        rho = c @ c.conj().T
        vals = np.real(np.einsum("gp,pq,gq->g", w, rho, w.conj()))
    vals = vals.reshape(resolution, resolution) / np.pi
    return QGrid(re, im, vals)


def q_peaks(grid: QGrid, rel_threshold: float = 0.1, size: int = 5) -> list[complex]:
    """Local maxima of Q above ``rel_threshold`` times the global peak."""
    vals = grid.values
    local = ndimage.maximum_filter(vals, size=size, mode="nearest") == vals
    strong = vals >= rel_threshold * vals.max()
    labels, count = ndimage.label(local & strong)
    peaks = []
    for idx in ndimage.find_objects(labels):
        i = (idx[0].start + idx[0].stop - 1) // 2
        k = (idx[1].start + idx[1].stop - 1) // 2
        peaks.append(complex(grid.re[k], grid.im[i]))
    return peaks


@dataclass
class ObservableSeries:
    """Time series of the ensemble and field observables."""

    t: np.ndarray
    jz: np.ndarray
    mean_n: np.ndarray
    purity_deficit: np.ndarray
    entropy: np.ndarray
    jz_direct: np.ndarray
    norm: np.ndarray

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "t": self.t,
            "jz": self.jz,
            "mean_n": self.mean_n,
            "purity_deficit": self.purity_deficit,
            "entropy": self.entropy,
        }


def observable_series(
    state0: AmplitudeTable, times, params: ModelParams, workers: int = 1, evolution=None
) -> ObservableSeries:
    """Evolve ``state0`` over ``times`` and record every observable.

    The inversion uses the conserved excitation number; ``jz_direct`` keeps
    the independent population sum for cross-checks.
    """
    times = np.asarray(times, dtype=float)
    evo = evolution if evolution is not None else SectorEvolution(state0, params, workers)
    excitation0 = excitation_number(state0)
    cols = {k: np.empty(times.size) for k in ("jz", "n", "pd", "s", "jd", "norm")}
    for i, t in enumerate(times):
        st = evo.state(float(t))
        w = schmidt_spectrum(st)
        nz = w[w > _ENTROPY_CUTOFF]
        cols["n"][i] = mean_photon(st)
        cols["jz"][i] = excitation0 - cols["n"][i]
        cols["pd"][i] = 1.0 - np.sum(w * w)
        cols["s"][i] = -np.sum(nz * np.log(nz))
        cols["jd"][i] = inversion_direct(st)
        cols["norm"][i] = st.norm()
    return ObservableSeries(
        times, cols["jz"], cols["n"], cols["pd"], cols["s"], cols["jd"], cols["norm"]
    )


def snapshot_times(series: ObservableSeries) -> tuple[float, float]:
    """Times of the entropy minimum and of half that time.

    The minimum is taken after the entropy first reaches half its maximum so
    the trivial ``S = 0`` at ``t = 0`` is skipped.  A series that never
    entangles falls back to the last time.
    """
    s = series.entropy
    t = series.t
    if s.size == 0:
        raise ValueError("empty series")
    peak = s.max()
    if peak <= _ENTROPY_CUTOFF:
        t_min = float(t[-1])
    else:
        start = int(np.argmax(s >= 0.5 * peak))
        t_min = float(t[start + int(np.argmin(s[start:]))])
    return 0.5 * t_min, t_min
