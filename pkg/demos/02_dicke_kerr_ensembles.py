# %% [markdown]
# # Ensembles of 3 and 25 qubits, with and without Kerr
#
# Starting from |alpha = 5>|all qubits down>, the Dicke model spreads the
# field and the inversion collapses for good on these time scales.  With
# kappa = gamma = lambda the Kerr phase dominates: the inversion revives
# periodically with period close to pi, and at a quarter of that period the
# field Q function shows four lobes.

# %%
import numpy as np
from scipy.signal import find_peaks

from sgdicke import ModelParams, SectorEvolution, coherent_state, husimi_q, observable_series, q_peaks
from sgdicke.observables import snapshot_times

from _common import out, plt, save


def run(n_qubits, kerr):
    p = ModelParams(n_qubits, detuning=0.0, kerr=kerr, qubit_qubit=kerr, coupling=1.0)
    state, _ = coherent_state(5.0, n_qubits)
    evo = SectorEvolution(state, p)
    return evo, observable_series(state, np.linspace(0, 20, 1001), p, evolution=evo)


def revival_period(s):
    jz = s.jz - s.jz.mean()
    ac = np.correlate(jz, jz, "full")[jz.size - 1 :]
    peaks, _ = find_peaks(ac / ac[0], height=0.3, distance=50)
    peaks = peaks[s.t[peaks] > 1.0]
    return s.t[peaks[0]] if peaks.size else None


# %%
results = {}
for N in (3, 25):
    for kerr in (0.0, 1.0):
        evo, s = run(N, kerr)
        results[N, kerr] = (evo, s)
        cols = s.columns()
        np.savetxt(out(f"ensemble_N{N}_kerr{kerr:g}.csv"), np.column_stack(list(cols.values())),
                   delimiter=",", header=",".join(cols), comments="")
        print(f"N={N:2d} kappa={kerr:g}: max entropy {s.entropy.max():.3f} (bound ln(N+1) = {np.log(N + 1):.3f})")

# %% [markdown]
# Revival period from the inversion autocorrelation, and Q lobes.

# %%
grids = {}
for N in (3, 25):
    evo, s = results[N, 1.0]
    period = revival_period(s)
    half, t_min = snapshot_times(s)
    for label, t in (("period/4", period / 4), ("t_min/2", half), ("t_min", t_min)):
        g = husimi_q(evo.state(t), 0.0, 9.0, 121)
        grids[N, label] = (t, g)
        print(f"N={N:2d}: {len(q_peaks(g))} Q maxima at {label} = {t:.2f}")
    print(f"N={N:2d}: revival period {period:.3f}")

# %%
if plt is not None:
    fig, ax = plt.subplots(2, 2, figsize=(10, 6), sharex=True)
    for row, N in enumerate((3, 25)):
        for kerr in (0.0, 1.0):
            s = results[N, kerr][1]
            ax[row, 0].plot(s.t, s.jz, lw=0.6, label=f"kappa={kerr:g}")
            ax[row, 1].plot(s.t, s.entropy, lw=0.8, label=f"kappa={kerr:g}")
        ax[row, 0].set_title(f"<Jz>, N={N}")
        ax[row, 1].set_title(f"entropy, N={N}")
        ax[row, 0].legend()
    save(fig, "ensembles.png")
    fig, ax = plt.subplots(2, 3, figsize=(12, 8))
    for row, N in enumerate((3, 25)):
        for col, label in enumerate(("period/4", "t_min/2", "t_min")):
            t, g = grids[N, label]
            ax[row, col].pcolormesh(g.re, g.im, g.values, shading="auto")
            ax[row, col].set_aspect("equal")
            ax[row, col].set_title(f"N={N}, {label} = {t:.2f}")
    save(fig, "ensembles_q.png")
