# %% [markdown]
# # From a weakly coupled Rabi model to Dicke-Kerr
#
# A generalized Rabi model (two-photon term chi, Kerr kappa, qubit-qubit xi)
# maps onto the rotating-frame model when chi/omega_f and the rotation
# parameter are small.  We compare the lowest levels of both, each measured
# from its own uncoupled spectrum, and watch the mismatch shrink roughly
# fourfold each time g halves.

# %%
import numpy as np

from sgdicke.rabi import RabiParams, critical_coupling, effective_params, spectral_discrepancy

from _common import out

rabi = RabiParams(omega_f=1.0, omega_q=1.3, g=0.08, n_qubits=1, kerr=0.002, chi=0.02, xi=0.005)
report = effective_params(rabi)
print("effective parameters:", report.to_dict()["effective"])
print("flags:", report.flags, f"critical coupling {critical_coupling(rabi):.3f}")

# %%
rows = []
g = rabi.g
for _ in range(5):
    r = rabi.replace(g=g)
    rows.append((g, spectral_discrepancy(r), effective_params(r).rotation_ratio))
    g /= 2
for (g1, d1, _), (g2, d2, _) in zip(rows, rows[1:]):
    print(f"g {g1:.4f} -> {g2:.4f}: discrepancy {d1:.2e} -> {d2:.2e} (x{d1 / d2:.2f})")
np.savetxt(out("rabi_trend.csv"), np.array(rows), delimiter=",", header="g,discrepancy,rotation_ratio", comments="")
