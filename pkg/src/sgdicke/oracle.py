"""Brute-force reference dynamics in the truncated product basis.

Nothing here reuses the sector code: operators are assembled from the
textbook ladder and collective-spin matrices, and evolution goes through a
dense Hermitian eigendecomposition.  Basis ordering is photon-number major,
Dicke index minor: ``index = p * (N + 1) + m``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .model import ModelParams
from .transform import AmplitudeTable

__all__ = [
    "annihilation",
    "spin_operators",
    "dense_hamiltonian",
    "dense_evolve",
    "to_dense_vector",
    "from_dense_vector",
    "auxiliary_functions",
    "auxiliary_hamiltonians",
    "ladder_frame_transform",
    "factorized_propagator",
    "factorization_report",
    "dense_rabi_hamiltonian",
]


def annihilation(p_cut: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, p_cut + 1, dtype=float)), 1)


def spin_operators(n_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``Jz, J+, J-`` for spin ``N/2`` in the basis ``m_z = -N/2 .. N/2``."""
    jj = n_qubits / 2
    mz = np.arange(n_qubits + 1) - jj
    jz = np.diag(mz)
    # <mz+1|J+|mz> = sqrt(j(j+1) - mz(mz+1))
    up = np.sqrt(jj * (jj + 1) - mz[:-1] * (mz[:-1] + 1))
    jp = np.diag(up, -1)
    return jz, jp, jp.T.copy()


def dense_hamiltonian(params: ModelParams, p_cut: int) -> np.ndarray:
    """Truncated matrix of ``delta Jz + kappa n**2 + gamma Jz**2 + lam(a J+ + a^dag J-)``."""
    if p_cut < 1:
        raise ValueError("p_cut must be >= 1")
    a = annihilation(p_cut)
    n_op = a.T @ a
    jz, jp, jm = spin_operators(params.n_qubits)
    eye_f = np.eye(p_cut + 1)
    eye_q = np.eye(params.n_qubits + 1)
    H = (
        params.detuning * np.kron(eye_f, jz)
        + params.kerr * np.kron(n_op @ n_op, eye_q)
        + params.qubit_qubit * np.kron(eye_f, jz @ jz)
        + params.coupling * (np.kron(a, jp) + np.kron(a.T, jm))
    )
    return H


def dense_evolve(H: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        return np.array(psi0, dtype=np.complex128)
    e, v = np.linalg.eigh(H)
    return v @ (np.exp(-1j * e * t) * (v.conj().T @ psi0))


def to_dense_vector(state: AmplitudeTable, p_cut: int) -> np.ndarray:
    if state.p_max > p_cut and np.any(state.amplitudes[p_cut + 1 :] != 0):
        raise ValueError("state does not fit below p_cut")
    out = np.zeros((p_cut + 1, state.n_qubits + 1), dtype=np.complex128)
    rows = min(p_cut, state.p_max) + 1
    out[:rows] = state.amplitudes[:rows]
    return out.ravel()


def from_dense_vector(vec: np.ndarray, n_qubits: int) -> AmplitudeTable:
    return AmplitudeTable.from_vector(vec, n_qubits)


# -- two-factor construction ------------------------------------------------

def auxiliary_functions(params: ModelParams, convention: str):
    """Diagonal and coupling functions of the two auxiliary Hamiltonians.

    ``"offset"`` uses ``kappa (n - N/2 + j)**2`` and ``sqrt(n + 1 + N/2 - j)``;
    ``"semiclassical"`` uses the sector functions ``kappa (n - N/2 - j)**2``
    and ``sqrt(n + 1 - N/2 - j)``.  Both take the half-integer ``j``.
    """
    half = params.n_qubits / 2
    k, d, g, lam = params.kerr, params.detuning, params.qubit_qubit, params.coupling
    if convention == "offset":
        sign = 1.0
    elif convention == "semiclassical":
        sign = -1.0
    else:
        raise ValueError(f"unknown convention {convention!r}")

    def F(j, n):
        return k * (n - half + sign * j) ** 2 + j * (d + g * j)

    def G(j, n):
        ang = half * (half + 1) - j * (j - 1)
        photon = n + 1 + sign * half - j
        if ang <= 0 or photon <= 0:
            return 0.0
        return lam * np.sqrt(ang) * np.sqrt(photon)

    return F, G


def auxiliary_hamiltonians(params: ModelParams, p_cut: int, convention: str = "offset"):
    """Dense ``H_A`` and ``H_B``, both diagonal in the photon number."""
    N = params.n_qubits
    half = N / 2
    F, G = auxiliary_functions(params, convention)
    dim = (p_cut + 1) * (N + 1)
    HA = np.zeros((dim, dim))
    HB = np.zeros((dim, dim))

    def idx(n, j):
        return n * (N + 1) + int(round(j + half))

    for n in range(p_cut + 1):
        for m in range(N + 1):
            j = m - half
            HA[idx(n, j), idx(n, j)] = F(j, n)
            if m >= 1:
                c = G(j, n)
                HA[idx(n, j), idx(n, j - 1)] = HA[idx(n, j - 1), idx(n, j)] = c
    # H_B: projectors rho_k with k <= N/2 - 1 - j
    for m in range(N):
        j = m - half
        for k in range(0, int(round(half - 1 - j)) + 1):
            if k > p_cut:
                break
            HB[idx(k, j), idx(k, j)] += F(j, k)
    if N > 1:
        for m in range(1, N):
            j = m - half
            for k in range(0, int(round(half - 1 - j)) + 1):
                if k > p_cut:
                    break
                c = G(j, k)
                HB[idx(k, j), idx(k, j - 1)] += c
                HB[idx(k, j - 1), idx(k, j)] += c
    return HA, HB


def ladder_frame_transform(n_qubits: int, p_cut: int) -> np.ndarray:
    """``sum_m (V^dag)^(N-m) |m><m|`` truncated at ``p_cut`` photons.

    Maps frame label ``n`` of Dicke index ``m`` to the physical photon number
    ``n + N - m``; columns that would exceed ``p_cut`` are dropped.
    """
    N = n_qubits
    dim = (p_cut + 1) * (N + 1)
    T = np.zeros((dim, dim))
    for n in range(p_cut + 1):
        for m in range(N + 1):
            p = n + N - m
            if p <= p_cut:
                T[p * (N + 1) + m, n * (N + 1) + m] = 1.0
    return T


def factorized_propagator(
    params: ModelParams, p_cut: int, t: float, convention: str = "offset", reading: str = "literal"
) -> np.ndarray:
    """Two-factor propagator ``U_A(t) U_B(t)`` on the truncated product space.

    ``reading="literal"`` multiplies the two exponentials as written.
    ``reading="frame"`` carries ``U_A`` through the ladder transform ``T'``
    (``T' U_A T'^dag + P`` with ``P = 1 - T' T'^dag`` the states ``H_B`` lives
    on) before multiplying by ``U_B``.
    """
    HA, HB = auxiliary_hamiltonians(params, p_cut, convention)
    UA = expm(-1j * t * HA)
    UB = expm(-1j * t * HB)
    if reading == "literal":
        return UA @ UB
    if reading != "frame":
        raise ValueError(f"unknown reading {reading!r}")
    T = ladder_frame_transform(params.n_qubits, p_cut)
    P = np.eye(T.shape[0]) - T @ T.T
    return (T @ UA @ T.T + P) @ UB


def factorization_report(
    params: ModelParams,
    t: float,
    p_cut: int = 40,
    support: int = 8,
    n_states: int = 4,
    seed: int = 0,
) -> dict:
    """Max state deviation of every (convention, reading) pair from the oracle.

    Test states are random and supported on ``p <= support`` so every
    occupied sector stays inside the ``p_cut`` truncation of both the oracle
    and the frame transform (``support + N <= p_cut - N``).
    """
    N = params.n_qubits
    if support + 2 * N > p_cut:
        raise ValueError("p_cut too small for the requested support")
    rng = np.random.default_rng(seed)
    H = dense_hamiltonian(params, p_cut)
    dim = H.shape[0]
    states = []
    for _ in range(n_states):
        psi = np.zeros(dim, dtype=np.complex128)
        k = (support + 1) * (N + 1)
        psi[:k] = rng.normal(size=k) + 1j * rng.normal(size=k)
        states.append(psi / np.linalg.norm(psi))
    refs = [dense_evolve(H, psi, t) for psi in states]
    report = {"n_qubits": N, "t": t, "p_cut": p_cut, "deviation": {}, "unitarity": {}}
    for convention in ("offset", "semiclassical"):
        for reading in ("literal", "frame"):
            U = factorized_propagator(params, p_cut, t, convention, reading)
            dev = max(np.linalg.norm(U @ psi - ref) for psi, ref in zip(states, refs))
            key = f"{convention}/{reading}"
            report["deviation"][key] = float(dev)
            report["unitarity"][key] = float(np.abs(U.conj().T @ U - np.eye(dim)).max())
    return report


# -- generalized Rabi model -------------------------------------------------

def dense_rabi_hamiltonian(rabi, p_cut: int) -> np.ndarray:
    """Full strong-form Hamiltonian with squeezing and counter-rotating terms.

    ``wf n + kappa n**2 + chi (a**2 + a^dag**2) + wq Jz + (xi/N) Jz**2
    + (g/sqrt(N)) (a + a^dag)(J+ + J-)``.
    """
    N = rabi.n_qubits
    a = annihilation(p_cut)
    ad = a.T
    n_op = ad @ a
    jz, jp, jm = spin_operators(N)
    eye_f = np.eye(p_cut + 1)
    eye_q = np.eye(N + 1)
    field = rabi.omega_f * n_op + rabi.kerr * n_op @ n_op + rabi.chi * (a @ a + ad @ ad)
    H = (
        np.kron(field, eye_q)
        + np.kron(eye_f, rabi.omega_q * jz + (rabi.xi / N) * jz @ jz)
        + (rabi.g / np.sqrt(N)) * np.kron(a + ad, jp + jm)
    )
    return H
