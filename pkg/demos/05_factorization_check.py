# %% [markdown]
# # Fast path versus the dense oracle
#
# The dense oracle builds the full Hamiltonian on a truncated Fock space
# and exponentiates it.  The fast sector path must agree to 1e-8.  A
# two-factor construction (a shifted field frame times a small remainder
# block) is also compared; it reproduces the oracle only for one qubit
# without Kerr, and the table shows how far it falls off otherwise.

# %%
import numpy as np

from sgdicke import AmplitudeTable, ModelParams, evolve
from sgdicke.oracle import dense_evolve, dense_hamiltonian, factorization_report, to_dense_vector

rng = np.random.default_rng(0)
p_cut = 40
for N in (1, 2, 3):
    p = ModelParams(N, detuning=0.4, kerr=0.7, qubit_qubit=0.2)
    H = dense_hamiltonian(p, p_cut)
    amps = np.zeros((p_cut + 1, N + 1), dtype=complex)
    amps[:11] = rng.normal(size=(11, N + 1)) + 1j * rng.normal(size=(11, N + 1))
    st = AmplitudeTable(N, amps / np.linalg.norm(amps))
    dev = np.linalg.norm(to_dense_vector(evolve(st, 5.0, p), p_cut) - dense_evolve(H, to_dense_vector(st, p_cut), 5.0))
    print(f"N={N}: fast path vs oracle {dev:.1e}")

# %%
for N, kerr in ((1, 0.0), (1, 0.7), (2, 0.0), (3, 0.0)):
    p = ModelParams(N, detuning=0.4, kerr=kerr, qubit_qubit=0.2)
    rep = factorization_report(p, 2.0, p_cut=30, support=8)
    cells = ", ".join(f"{k} {v:.1e}" for k, v in rep["deviation"].items())
    print(f"N={N} kappa={kerr:g}: {cells}")
