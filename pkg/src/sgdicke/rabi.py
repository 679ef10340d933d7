"""Effective Dicke-Kerr parameters for a weakly coupled generalized Rabi model.

A weak two-photon term is removed by a squeezing transform and the
counter-rotating coupling by a small rotation, leaving the rotating-frame
Dicke-Kerr model with

    delta = wq - wf + 2 chi**2 / wf
    gamma = xi / N
    lam   = 2 g (wf - chi)(wf**2 - 2 chi**2) / (sqrt(N) wf (wf**2 - 2 chi**2 + wq wf))

Only these parameter-level consequences are implemented; the transforms
themselves are never built as operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams
from .propagator import sector_eigensystem

__all__ = [
    "RabiParams",
    "MappingReport",
    "SingularMappingError",
    "effective_params",
    "critical_coupling",
    "mapped_lab_spectrum",
    "rabi_spectrum",
    "spectral_discrepancy",
]


class SingularMappingError(ZeroDivisionError):
    """The effective coupling formula has a vanishing denominator."""


@dataclass(frozen=True)
class RabiParams:
    omega_f: float
    omega_q: float
    g: float
    n_qubits: int
    kerr: float = 0.0
    chi: float = 0.0
    xi: float = 0.0

    def __post_init__(self):
        if self.n_qubits < 1 or int(self.n_qubits) != self.n_qubits:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        for name in ("omega_f", "omega_q", "g", "kerr", "chi", "xi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega_f <= 0:
            raise ValueError("omega_f must be positive")

    def replace(self, **changes) -> "RabiParams":
        fields_ = dict(self.__dict__)
        fields_.update(changes)
        return RabiParams(**fields_)


@dataclass(frozen=True)
class MappingReport:
    params: ModelParams
    squeeze_ratio: float
    rotation_ratio: float
    nonlinearity_ratio: float
    threshold: float
    critical_coupling: float | None
    flags: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        p = self.params
        return {
            "effective": {
                "n_qubits": p.n_qubits,
                "detuning": p.detuning,
                "kerr": p.kerr,
                "qubit_qubit": p.qubit_qubit,
                "coupling": p.coupling,
            },
            "squeeze_ratio": self.squeeze_ratio,
            "rotation_ratio": self.rotation_ratio,
            "nonlinearity_ratio": self.nonlinearity_ratio,
            "threshold": self.threshold,
            "flags": dict(self.flags),
            "valid": self.valid,
            "critical_coupling": self.critical_coupling,
        }


def effective_params(rabi: RabiParams, threshold: float = 0.1) -> MappingReport:
    """Map the strong-form parameters onto the rotating-frame Dicke-Kerr model.

    The rotation ratio uses ``g / (wf - 2 chi**2/wf + wq)`` as the smallness
    parameter of the small rotation.  The nonlinearity flag is advisory: it
    checks that ``kappa`` and ``xi`` sit two orders of magnitude below ``wq``.
    """
    wf, wq, chi, g, N = rabi.omega_f, rabi.omega_q, rabi.chi, rabi.g, rabi.n_qubits
    denom = wf * (wf * wf - 2 * chi * chi + wq * wf)
    if denom == 0:
        raise SingularMappingError("wf**2 - 2 chi**2 + wq wf vanishes")
    lam = 2 * g * (wf - chi) * (wf * wf - 2 * chi * chi) / (math.sqrt(N) * denom)
    params = ModelParams(
        n_qubits=N,
        detuning=wq - wf + 2 * chi * chi / wf,
        kerr=rabi.kerr,
        qubit_qubit=rabi.xi / N,
        coupling=lam,
    )
    squeezed_wf = wf - 2 * chi * chi / wf
    rot_denom = squeezed_wf + wq
    rotation = abs(g / rot_denom) if rot_denom != 0 else math.inf
    squeeze = abs(chi / wf)
    nonlin = max(abs(rabi.kerr), abs(rabi.xi)) / abs(wq) if wq != 0 else math.inf
    flags = {
        "squeeze": squeeze < threshold,
        "rotation": rotation < threshold,
        "nonlinearity": nonlin <= 0.01,
    }
    return MappingReport(
        params, squeeze, rotation, nonlin, threshold, critical_coupling(rabi), flags
    )


def critical_coupling(rabi: RabiParams) -> float | None:
    """``sqrt((wf - 2 chi**2/wf)(wq - xi))`` or ``None`` when not real."""
    radicand = (rabi.omega_f - 2 * rabi.chi**2 / rabi.omega_f) * (rabi.omega_q - rabi.xi)
    if radicand < 0:
        return None
    return math.sqrt(radicand)


def mapped_lab_spectrum(params: ModelParams, omega_f: float, s_max: int) -> np.ndarray:
    """Sorted spectrum of the mapped model with the frame term ``wf(n + Jz)`` added back.

    ``n + Jz = s - N/2`` is constant on sector ``s``.
    """
    half = params.n_qubits / 2
    parts = [sector_eigensystem(s, params).values + omega_f * (s - half) for s in range(s_max + 1)]
    return np.sort(np.concatenate(parts))


def rabi_spectrum(rabi: RabiParams, p_cut: int) -> np.ndarray:
    from .oracle import dense_rabi_hamiltonian

    return np.linalg.eigvalsh(dense_rabi_hamiltonian(rabi, p_cut))


def spectral_discrepancy(
    rabi: RabiParams, n_levels: int = 4, p_cut: int = 40, threshold: float = 0.1
) -> float:
    """Largest mismatch of the coupling-induced shifts of the lowest levels.

    Each spectrum is measured relative to its own ``g = 0`` spectrum so the
    comparison isolates the coupling; what remains is the error of the
    effective coupling and of the small rotation.
    """
    def shifts(r):
        full = rabi_spectrum(r, p_cut)[:n_levels]
        mapped_params = effective_params(r, threshold).params
        mapped = mapped_lab_spectrum(mapped_params, r.omega_f, p_cut // 2)[:n_levels]
        return full, mapped

    full_g, mapped_g = shifts(rabi)
    full_0, mapped_0 = shifts(rabi.replace(g=0.0))
    return float(np.max(np.abs((full_g - full_0) - (mapped_g - mapped_0))))
