import numpy as np
import pytest

from sgdicke import AmplitudeTable, ModelParams


def random_params(rng, n_qubits, bound=2.0, coupling=1.0):
    d, k, g = rng.uniform(-bound, bound, size=3)
    return ModelParams(n_qubits, detuning=d, kerr=k, qubit_qubit=g, coupling=coupling)


def random_state(rng, n_qubits, support, p_max=None):
    """Normalized complex state on ``p <= support`` in a table closed to ``p_max``."""
    p_max = support + n_qubits if p_max is None else p_max
    amps = np.zeros((p_max + 1, n_qubits + 1), dtype=np.complex128)
    k = support + 1
    amps[:k] = rng.normal(size=(k, n_qubits + 1)) + 1j * rng.normal(size=(k, n_qubits + 1))
    amps /= np.linalg.norm(amps)
    return AmplitudeTable(n_qubits, amps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
