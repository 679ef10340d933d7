# %% [markdown]
# # One qubit in a coherent field
#
# A single qubit starts in its ground state next to a coherent field with
# alpha = 5.  Each excitation sector is a 2x2 block, so the inversion is a
# sum of Rabi oscillations at frequencies ~ sqrt(n).  They dephase (collapse)
# and rephase near t_r = 2 pi |alpha| (revival).  Halfway there the field
# splits into two lobes and the qubit-field entropy dips.

# %%
import math

import numpy as np

from sgdicke import ModelParams, SectorEvolution, coherent_state, husimi_q, observable_series, q_peaks
from sgdicke.observables import snapshot_times

from _common import out, plt, save

alpha = 5.0
t_rev = 2 * math.pi * alpha
jc = ModelParams(1, detuning=0.0, kerr=0.0, qubit_qubit=0.0, coupling=1.0)
state, tail = coherent_state(alpha, 1)
evo = SectorEvolution(state, jc)
times = np.linspace(0, 50, 2001)
series = observable_series(state, times, jc, evolution=evo)
print(f"p_max = {state.p_max}, truncated mass {tail:.1e}")

# %% [markdown]
# Collapse and revival of the inversion, and the entropy dip.

# %%
collapse = np.abs(series.jz[(times > 6) & (times < 20)]).max()
mid = (times > 0.3 * t_rev) & (times < 0.7 * t_rev)
t_dip = times[mid][np.argmin(series.entropy[mid])]
print(f"|<Jz>| during collapse <= {collapse:.1e}")
print(f"entropy dip at t = {t_dip:.2f}  (t_r/2 = {t_rev / 2:.2f})")
cols = series.columns()
np.savetxt(out("jc_observables.csv"), np.column_stack(list(cols.values())),
           delimiter=",", header=",".join(cols), comments="")

# %% [markdown]
# Husimi Q of the field at t_r/2: two lobes counter-rotating around the origin.

# %%
grid = husimi_q(evo.state(t_rev / 2), 0.0, 9.0, 121)
print(f"Q maxima at t_r/2: {[f'{z:.2f}' for z in q_peaks(grid)]}")

# %% [markdown]
# The same run with a Kerr medium (kappa = lambda).  Snapshot times come
# from the entropy trace: its global minimum after the initial rise and half
# of that time.

# %%
kerr = jc.replace(kerr=1.0, qubit_qubit=1.0)
evo_k = SectorEvolution(state, kerr)
series_k = observable_series(state, times, kerr, evolution=evo_k)
snaps = snapshot_times(series_k)
grids_k = [husimi_q(evo_k.state(t), 0.0, 9.0, 121) for t in snaps]
for t, g in zip(snaps, grids_k):
    print(f"Kerr run: {len(q_peaks(g))} Q maxima at t = {t:.2f}")

# %%
if plt is not None:
    fig, ax = plt.subplots(3, 2, figsize=(10, 9))
    for col, (s, name) in enumerate(((series, "no Kerr"), (series_k, "Kerr"))):
        ax[0, col].plot(s.t, s.jz, lw=0.6)
        ax[0, col].set_title(f"<Jz>, {name}")
        ax[1, col].plot(s.t, s.entropy, label="entropy")
        ax[1, col].plot(s.t, s.purity_deficit, label="1 - Tr rho^2")
        ax[1, col].legend()
    for col, g in enumerate((grid, grids_k[1])):
        ax[2, col].pcolormesh(g.re, g.im, g.values, shading="auto")
        ax[2, col].set_aspect("equal")
    ax[2, 0].set_title("Q at t_r/2")
    ax[2, 1].set_title(f"Q at t = {snaps[1]:.2f}, Kerr")
    save(fig, "jc.png")
