import math

import numpy as np
import pytest

from sgdicke import ModelParams, evolve
from sgdicke.oracle import (
    annihilation,
    auxiliary_hamiltonians,
    dense_evolve,
    dense_hamiltonian,
    dense_rabi_hamiltonian,
    factorization_report,
    factorized_propagator,
    from_dense_vector,
    ladder_frame_transform,
    spin_operators,
    to_dense_vector,
)
from sgdicke.rabi import RabiParams

from conftest import random_params, random_state


def test_spin_algebra():
    for N in (1, 2, 5):
        jz, jp, jm = spin_operators(N)
        assert np.allclose(jp @ jm - jm @ jp, 2 * jz)
        assert np.allclose(jz @ jp - jp @ jz, jp)
        j = N / 2
        casimir = jz @ jz + 0.5 * (jp @ jm + jm @ jp)
        assert np.allclose(casimir, j * (j + 1) * np.eye(N + 1))


def test_annihilation():
    a = annihilation(4)
    assert np.allclose(np.diag(a.T @ a), np.arange(5))


def test_dense_hamiltonian_examples():
    H = dense_hamiltonian(ModelParams(2, detuning=0.3, kerr=0.4, coupling=0.0), 5)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    H1 = dense_hamiltonian(ModelParams(1, coupling=0.7), 1)
    # index = p*(N+1) + m; |0, m=1> <-> |1, m=0>
    expect = np.zeros((4, 4))
    expect[1, 2] = expect[2, 1] = 0.7
    np.testing.assert_allclose(H1, expect, atol=1e-15)


def test_dense_matrix_elements(rng):
    p = random_params(rng, 3)
    N, pc = 3, 6
    H = dense_hamiltonian(p, pc)
    assert np.abs(H - H.T).max() < 1e-12
    for P in range(pc + 1):
        for m in range(N + 1):
            j = m - N / 2
            i = P * (N + 1) + m
            assert H[i, i] == pytest.approx(p.kerr * P * P + j * p.detuning + p.qubit_qubit * j * j)
            if m >= 1 and P + 1 <= pc:
                A = math.sqrt(N / 2 * (N / 2 + 1) - j * (j - 1))
                k = (P + 1) * (N + 1) + m - 1
                assert H[k, i] == pytest.approx(p.coupling * math.sqrt(P + 1) * A)
    # excitation blocks only
    rows, cols = np.nonzero(H)
    s_of = lambda idx: idx // (N + 1) + idx % (N + 1)
    assert np.all(s_of(rows) == s_of(cols))


def test_dense_evolve_basics(rng):
    H = dense_hamiltonian(random_params(rng, 2), 8)
    psi = rng.normal(size=H.shape[0]) + 1j * rng.normal(size=H.shape[0])
    psi /= np.linalg.norm(psi)
    assert np.array_equal(dense_evolve(H, psi, 0.0), psi)
    assert np.linalg.norm(dense_evolve(H, psi, 3.0)) == pytest.approx(1.0, abs=1e-10)
    D = np.diag(np.arange(4.0))
    v = np.ones(4) / 2
    np.testing.assert_allclose(dense_evolve(D, v, 0.5), v * np.exp(-0.5j * np.arange(4)), atol=1e-15)


def test_vector_round_trip(rng):
    st = random_state(rng, 2, 5)
    back = from_dense_vector(to_dense_vector(st, st.p_max), 2)
    np.testing.assert_array_equal(back.amplitudes, st.amplitudes)
    with pytest.raises(ValueError):
        to_dense_vector(st, 2)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_fast_path_matches_oracle(rng, N):
    p = random_params(rng, N)
    pc = 30
    H = dense_hamiltonian(p, pc)
    st = random_state(rng, N, 10, p_max=pc)
    for t in (0.1, 1.0, 10.0):
        ref = dense_evolve(H, to_dense_vector(st, pc), t)
        got = to_dense_vector(evolve(st, t, p), pc)
        assert np.linalg.norm(got - ref) < 1e-8


def test_auxiliary_single_qubit_structure():
    p = ModelParams(1, detuning=0.4, kerr=0.3, coupling=0.8)
    HA, HB = auxiliary_hamiltonians(p, 6)
    # only |p=0, m=0> survives in H_B for one qubit
    nz = np.flatnonzero(np.abs(HB).sum(axis=0))
    assert list(nz) == [0]
    assert np.abs(HA - HA.T).max() == 0


def test_factorized_identity_and_unitarity():
    p = ModelParams(2, detuning=0.2, kerr=0.3, qubit_qubit=0.1)
    for reading in ("literal", "frame"):
        U0 = factorized_propagator(p, 10, 0.0, reading=reading)
        assert np.abs(U0 - np.eye(U0.shape[0])).max() < 1e-14
    U = factorized_propagator(p, 10, 1.1, reading="literal")
    assert np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() < 1e-10


def test_frame_transform_is_right_unitary():
    T = ladder_frame_transform(2, 8)
    P = np.eye(T.shape[0]) - T @ T.T
    assert np.allclose(P @ P, P)
    assert np.allclose(T.T @ T @ T.T, T.T)


def test_factorization_single_qubit_kerr_free(rng):
    for _ in range(3):
        p = ModelParams(1, detuning=rng.uniform(-2, 2), qubit_qubit=rng.uniform(-2, 2))
        rep = factorization_report(p, float(rng.uniform(0.1, 5)), p_cut=30, support=8)
        assert rep["deviation"]["offset/frame"] < 1e-8


def test_rabi_hamiltonian_decoupled():
    r = RabiParams(omega_f=1.0, omega_q=1.4, g=0.0, n_qubits=2, kerr=0.05, xi=0.2)
    H = dense_rabi_hamiltonian(r, 6)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    for P in range(7):
        for m in range(3):
            j = m - 1
            assert H[P * 3 + m, P * 3 + m] == pytest.approx(P + 0.05 * P * P + 1.4 * j + 0.1 * j * j)


def test_rabi_hamiltonian_converges_in_cutoff():
    r = RabiParams(omega_f=1.0, omega_q=1.2, g=0.05, n_qubits=2, chi=0.02)
    lo = np.linalg.eigvalsh(dense_rabi_hamiltonian(r, 30))[:4]
    hi = np.linalg.eigvalsh(dense_rabi_hamiltonian(r, 60))[:4]
    assert np.abs(lo - hi).max() < 1e-8
