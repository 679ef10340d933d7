import math

import numpy as np
import pytest

from sgdicke import (
    AmplitudeTable,
    ModelParams,
    coherent_state,
    entropy,
    evolve,
    fock_dicke_state,
    husimi_q,
    mean_photon,
    observable_series,
    population_inversion,
    purity_deficit,
    q_peaks,
    reduced_ensemble,
    reduced_field,
    sector_eigensystem,
    sector_propagator,
)
from sgdicke.observables import (
    excitation_number,
    inversion_direct,
    schmidt_spectrum,
    snapshot_times,
)

from conftest import random_params, random_state


def bell():
    amps = np.zeros((2, 2), dtype=complex)
    amps[0, 1] = amps[1, 0] = 1 / math.sqrt(2)
    return AmplitudeTable(1, amps)


def test_mean_photon_examples():
    assert mean_photon(fock_dicke_state(0, 2, 3)) == 0
    state, tail = coherent_state(5.0, 2)
    assert mean_photon(state) == pytest.approx(25.0, abs=1e-9)
    p = ModelParams(2, kerr=0.4, detuning=0.2, coupling=0.0)
    assert mean_photon(evolve(state, 3.3, p)) == pytest.approx(mean_photon(state), abs=1e-12)


def test_inversion_examples():
    state, _ = coherent_state(1.5, 4)
    n0 = excitation_number(state)
    assert population_inversion(state, n0) == pytest.approx(-2.0, abs=1e-12)
    top = fock_dicke_state(0, 4, 4)
    assert population_inversion(top, excitation_number(top)) == pytest.approx(2.0)


def test_inversion_two_paths_agree(rng):
    p = random_params(rng, 3)
    state, _ = coherent_state(2.5, 3)
    n0 = excitation_number(state)
    for t in (0.4, 3.0, 12.0):
        st = evolve(state, t, p)
        assert abs(population_inversion(st, n0) - inversion_direct(st)) < 1e-10


def test_reduced_examples(rng):
    state, _ = coherent_state(1.2 + 0.5j, 2, m0=1)
    w = np.linalg.eigvalsh(reduced_ensemble(state))
    assert w[-1] == pytest.approx(1.0, abs=1e-12) and np.all(np.abs(w[:-1]) < 1e-12)
    b = bell()
    np.testing.assert_allclose(np.linalg.eigvalsh(reduced_field(b)), [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(reduced_ensemble(b)), [0.5, 0.5], atol=1e-15)
    assert entropy(b) == pytest.approx(math.log(2))
    assert purity_deficit(b) == pytest.approx(0.5)


def test_density_invariants(rng):
    p = random_params(rng, 3)
    st = evolve(random_state(rng, 3, 8), 2.2, p)
    for rho in (reduced_field(st), reduced_ensemble(st)):
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
    assert np.sum(np.linalg.eigvalsh(reduced_field(st)) > 1e-10) <= 4


def test_schmidt_duality(rng):
    for N in (1, 2, 4):
        p = random_params(rng, N)
        st = evolve(random_state(rng, N, 7), 1.7, p)
        f = schmidt_spectrum(st, "field")
        e = schmidt_spectrum(st, "ensemble")
        a = schmidt_spectrum(st, "auto")
        np.testing.assert_allclose(f[: N + 1], e, atol=1e-10)
        np.testing.assert_allclose(a[: N + 1], e, atol=1e-10)
        assert abs(purity_deficit(st, "field") - purity_deficit(st, "ensemble")) < 1e-10
        assert abs(entropy(st, "field") - entropy(st, "ensemble")) < 1e-10
        assert -1e-10 <= entropy(st) <= math.log(N + 1) + 1e-10
        assert -1e-10 <= purity_deficit(st) <= 1 - 1 / (N + 1) + 1e-10
    with pytest.raises(ValueError):
        schmidt_spectrum(st, "both")


def test_maximally_mixed_bound():
    N = 3
    amps = np.zeros((N + 1, N + 1), dtype=complex)
    for m in range(N + 1):
        amps[N - m, m] = 1 / math.sqrt(N + 1)
    st = AmplitudeTable(N, amps)
    assert purity_deficit(st) == pytest.approx(1 - 1 / (N + 1))
    assert entropy(st) == pytest.approx(math.log(N + 1))


def test_decoupled_evolution_stays_separable():
    p = ModelParams(3, detuning=0.4, kerr=0.9, qubit_qubit=0.3, coupling=0.0)
    state, _ = coherent_state(3.0, 3, m0=2)
    series = observable_series(state, np.linspace(0, 5, 11), p)
    assert np.abs(series.entropy).max() < 1e-10
    assert np.abs(series.purity_deficit).max() < 1e-10


def test_series_columns_and_conservation(rng):
    p = random_params(rng, 2)
    state, _ = coherent_state(2.0, 2)
    series = observable_series(state, np.linspace(0, 6, 13), p)
    assert list(series.columns()) == ["t", "jz", "mean_n", "purity_deficit", "entropy"]
    assert series.jz[0] == pytest.approx(-1.0, abs=1e-10) and series.entropy[0] < 1e-10
    assert np.abs(series.norm - series.norm[0]).max() < 1e-10
    assert np.abs(series.jz - series.jz_direct).max() < 1e-10


# -- Husimi function --------------------------------------------------------

def test_q_coherent_peak():
    alpha = 2.0 - 1.0j
    state, _ = coherent_state(alpha, 1)
    g = husimi_q(state, center=alpha, half_width=4.0, resolution=81)
    i, k = np.unravel_index(np.argmax(g.values), g.values.shape)
    assert complex(g.re[k], g.im[i]) == pytest.approx(alpha, abs=0.11)
    assert g.values.max() == pytest.approx(1 / math.pi, rel=1e-3)
    assert q_peaks(g) == [complex(g.re[k], g.im[i])]


def test_q_vacuum_and_normalization():
    vac = fock_dicke_state(0, 0, 2)
    g = husimi_q(vac, 0.0, 6.0, 121)
    assert g.values[60, 60] == pytest.approx(1 / math.pi, rel=1e-12)
    assert g.total() == pytest.approx(1.0, abs=1e-3)
    assert g.values.min() >= -1e-12


def test_q_large_photon_numbers_stable():
    state, _ = coherent_state(14.0, 1)
    g = husimi_q(state, 14.0, 4.0, 41)
    assert np.all(np.isfinite(g.values))
    assert g.values.max() == pytest.approx(1 / math.pi, rel=1e-2)


def test_q_kerr_cat():
    kappa = 0.5
    p = ModelParams(1, kerr=kappa, coupling=0.0)
    state, _ = coherent_state(3.0, 1)
    g = husimi_q(evolve(state, math.pi / (2 * kappa), p), 0.0, 6.0, 121)
    peaks = q_peaks(g)
    assert len(peaks) == 2
    assert abs(abs(peaks[0]) - 3.0) < 0.2 and abs(peaks[0] + peaks[1]) < 0.3


def test_snapshot_times_skip_origin():
    p = ModelParams(1)
    state, _ = coherent_state(3.0, 1)
    series = observable_series(state, np.linspace(0, 25, 501), p)
    half, t_min = snapshot_times(series)
    assert t_min > 5 and half == pytest.approx(t_min / 2)


# -- literal transcription of the explicit component sums -------------------

def _sector_u(params, s, t):
    return sector_propagator(sector_eigensystem(s, params), t).U


def _coefficient(c, p, m):
    if p < 0 or p >= c.shape[0]:
        return 0.0
    return c[p, m]


def _u_component(params, t, l, j, n, cache):
    """``U_{l,j}(n, t)`` on the full Dicke range, zero outside the sector."""
    N = params.n_qubits
    ml = int(round(l + N / 2))
    mj = int(round(j + N / 2))
    s = int(round(n))
    if s not in cache:
        cache[s] = _u_full(params, s, t)
    return cache[s][ml, mj]


def _u_full(params, s, t):
    N = params.n_qubits
    U = np.zeros((N + 1, N + 1), dtype=complex)
    d = min(s, N) + 1
    U[:d, :d] = _sector_u(params, s, t)
    return U


def literal_rho_f(state, params, t):
    N = params.n_qubits
    c = state.amplitudes
    P = c.shape[0]
    spins = [m - N / 2 for m in range(N + 1)]
    cache = {}
    rho = np.zeros((P, P), dtype=complex)
    for p in range(P):
        for q in range(P):
            acc = 0.0
            for j in spins:
                for k in spins:
                    for l in spins:
                        a = _coefficient(c, int(round(p + l - j)), int(round(j + N / 2)))
                        b = _coefficient(c, int(round(q + l - k)), int(round(k + N / 2)))
                        if a == 0 or b == 0:
                            continue
                        acc += (
                            a
                            * np.conj(b)
                            * _u_component(params, t, l, j, p + l + N / 2, cache)
                            * np.conj(_u_component(params, t, l, k, q + l + N / 2, cache))
                        )
            rho[p, q] = acc
    return rho


def literal_mean_n(state, params, t):
    N = params.n_qubits
    c = state.amplitudes
    spins = [m - N / 2 for m in range(N + 1)]
    cache = {}
    total = 0.0
    for p in range(c.shape[0]):
        for j in spins:
            for k in spins:
                for l in spins:
                    a = _coefficient(c, int(round(p + l - j)), int(round(j + N / 2)))
                    b = _coefficient(c, int(round(p + l - k)), int(round(k + N / 2)))
                    if a == 0 or b == 0:
                        continue
                    total += (
                        p
                        * a
                        * np.conj(b)
                        * _u_component(params, t, l, j, p + l + N / 2, cache)
                        * np.conj(_u_component(params, t, l, k, p + l + N / 2, cache))
                    )
    return total


def literal_trace_rho2(state, params, t, first="o"):
    """Six-index purity sum with ``U_{first,j}`` as the first factor (``"l"`` is correct)."""
    N = params.n_qubits
    c = state.amplitudes
    P = c.shape[0]
    spins = [m - N / 2 for m in range(N + 1)]
    cache = {}

    def C(p, m):
        return _coefficient(c, int(round(p)), int(round(m + N / 2)))

    def U(a, b, n):
        return _u_component(params, t, a, b, n, cache)

    total = 0.0
    h = N / 2
    for p in range(P):
        for q in range(P):
            for j in spins:
                for k in spins:
                    for l in spins:
                        for m in spins:
                            for n in spins:
                                for o in spins:
                                    coeff = C(p + l - j, j) * C(q + o - m, m) * np.conj(C(q + l - k, k) * C(p + o - n, n))
                                    if coeff == 0:
                                        continue
                                    lead = U(o if first == "o" else l, j, p + l + h)
                                    total += coeff * lead * U(o, m, q + o + h) * np.conj(U(l, k, q + l + h) * U(o, n, p + o + h))
    return total


@pytest.fixture
def small_case():
    rng = np.random.default_rng(7)
    params = random_params(rng, 2, bound=1.0)
    state = random_state(rng, 2, 3)
    return state, params, 1.3


def test_literal_rho_f_matches_production(small_case):
    state, params, t = small_case
    st = evolve(state, t, params)
    rho = literal_rho_f(state, params, t)
    prod = reduced_field(st)
    assert np.abs(rho - prod[: rho.shape[0], : rho.shape[0]]).max() < 1e-12


def test_literal_mean_photon_matches_production(small_case):
    state, params, t = small_case
    assert literal_mean_n(state, params, t) == pytest.approx(mean_photon(evolve(state, t, params)), abs=1e-12)


def test_literal_purity_sum(small_case):
    state, params, t = small_case
    target = 1.0 - purity_deficit(evolve(state, t, params))
    corrected = literal_trace_rho2(state, params, t, first="l")
    swapped = literal_trace_rho2(state, params, t, first="o")
    assert corrected == pytest.approx(target, abs=1e-12)
    # U_{o,j} in the first factor does not reproduce Tr rho_f**2
    assert abs(swapped - target) > 1e-3
