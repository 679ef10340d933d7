# %% [markdown]
# # Inside one excitation sector
#
# Each sector is a real symmetric tridiagonal matrix.  Its eigenvalues are
# the roots of the leading-minor recurrence, found by Sturm-count bisection;
# eigenvectors come from inverse iteration.  This demo looks at a large
# sector, checks the spectral identities and shows the interlacing of the
# leading minors.

# %%
import time

import numpy as np

from sgdicke import ModelParams, build_sector, diagonalize, eigenvalues_bisect, sturm_count

from _common import out, plt, save

p = ModelParams(1000, detuning=0.3, kerr=1.0, qubit_qubit=1.0, coupling=1.0)
M = build_sector(1000, p)
start = time.perf_counter()
eig = diagonalize(M)
print(f"sector s=1000, d={M.dim}: diagonalized in {time.perf_counter() - start:.2f} s")

# %%
dense = M.to_dense()
print(f"trace residual       {abs(eig.values.sum() - np.trace(dense)):.2e}")
print(f"reconstruction error {np.abs(eig.reconstruct() - dense).max() / M.norm():.2e}")
print(f"orthogonality error  {np.abs(eig.vectors.T @ eig.vectors - np.eye(M.dim)).max():.2e}")
mid = eig.values[M.dim // 2]
print(f"eigenvalues below {mid:.3f}: {sturm_count(M, mid)}")

# %% [markdown]
# Interlacing: eigenvalues of successive leading minors nest.

# %%
small = ModelParams(12, detuning=0.3, kerr=0.2, qubit_qubit=0.1, coupling=1.0)
S = build_sector(12, small)
levels = [eigenvalues_bisect(S.leading_minor(k)) for k in range(1, S.dim + 1)]
with open(out("interlacing.csv"), "w") as fh:
    fh.write("k,nu\n")
    for k, vals in enumerate(levels, 1):
        fh.writelines(f"{k},{v:.17g}\n" for v in vals)

# %%
if plt is not None:
    fig, ax = plt.subplots(1, 2, figsize=(10, 4))
    ax[0].plot(eig.values, ".", ms=2)
    ax[0].set_title("eigenvalues, s=1000, N=1000")
    for k, vals in enumerate(levels, 1):
        ax[1].plot([k] * len(vals), vals, "k_", ms=10)
    ax[1].set_xlabel("leading minor size")
    ax[1].set_title("interlacing")
    save(fig, "spectrum.png")
