"""Symmetric tridiagonal eigensolver built on the leading-minor recurrence.

Each sector block is diagonalised without a dense solver:

* ``charpoly_eval`` runs the three-term minor recurrence
  ``p_k = (nu - a) p_{k-1} - b**2 p_{k-2}`` starting from the highest Dicke
  index, rescaling every step so ``d`` in the thousands neither overflows nor
  underflows.
* ``sturm_count`` is the ratio form of the same recurrence (LDL^T pivots of
  ``M - nu``), counting eigenvalues strictly below ``nu``.
* ``eigenvalues_bisect`` brackets every eigenvalue by bisection on the count.
* ``eigenvector`` uses inverse iteration seeded with the bisected eigenvalue,
  re-orthogonalising inside clusters.  The forward amplitude recurrence is kept
  as ``eigenvector_recurrence`` for cross-checking small blocks.

The hot loops are compiled with numba and release the GIL, so distinct sectors
can be diagonalised from a thread pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .model import SectorMatrix

__all__ = [
    "CharPolySequence",
    "Eigensystem",
    "charpoly_eval",
    "sturm_count",
    "eigenvalues_bisect",
    "eigenvector",
    "eigenvector_recurrence",
    "diagonalize",
    "RecurrenceBreakdown",
]

DEFAULT_TOL = 1e-12
_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


class RecurrenceBreakdown(ArithmeticError):
    """The forward amplitude recurrence hit a vanishing coupling."""


@dataclass(frozen=True)
class CharPolySequence:
    """Leading-minor values ``p_0 .. p_d`` at one or more probe points.

    ``p_k = mantissa[k] * exp(log_scale[k])``; the last axis indexes probes when
    the probe was an array.  ``agreements`` counts consecutive equal signs,
    which equals the number of eigenvalues strictly below the probe.
    """

    mantissa: np.ndarray
    log_scale: np.ndarray
    agreements: np.ndarray | int

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.mantissa * np.exp(self.log_scale)

    def final(self) -> np.ndarray:
        """``p_d`` at each probe (may overflow to inf for huge blocks)."""
        return self.values()[-1]


@dataclass(frozen=True)
class Eigensystem:
    """Eigenpairs of one sector; columns of ``vectors`` are orthonormal.

    ``values == shift + offsets``.  The solver works on ``M - shift`` (shift =
    mean diagonal) so large Kerr energies do not eat the relative tolerance;
    propagators apply the two phases separately.
    """

    s: int
    values: np.ndarray
    vectors: np.ndarray
    shift: float = 0.0
    offsets: np.ndarray | None = None

    def __post_init__(self):
        if self.offsets is None:
            object.__setattr__(self, "offsets", self.values - self.shift)

    def phases(self, t: float) -> np.ndarray:
        """``exp(-i values t)`` evaluated as shift phase times offset phases."""
        return np.exp(-1j * self.shift * t) * np.exp(-1j * self.offsets * t)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def charpoly_eval(matrix: SectorMatrix, nu) -> CharPolySequence:
    """Minor sequence of ``det(nu - M_k)``, growing from the top Dicke index down.

    ``p_1 = nu - a[d-1]`` and each further step adds the next lower index, which
    is the order the minors are expanded in the method of minors.
    """
    nu = np.asarray(nu, dtype=np.float64)
    scalar = nu.ndim == 0
    probes = np.atleast_1d(nu)
    a = matrix.diag[::-1]
    b2 = (matrix.offdiag[::-1]) ** 2
    d = a.shape[0]

    mant = np.empty((d + 1, probes.size))
    logs = np.empty((d + 1, probes.size))
    agree = np.zeros(probes.size, dtype=np.int64)

    prev2 = np.zeros(probes.size)
    prev = np.ones(probes.size)
    sign_prev = np.ones(probes.size)
    scale = np.zeros(probes.size)
    mant[0], logs[0] = 1.0, 0.0
    for k in range(d):
        cur = (probes - a[k]) * prev
        if k > 0:
            cur = cur - b2[k - 1] * prev2
        mant[k + 1] = cur
        logs[k + 1] = scale
        sign_cur = np.sign(cur)
        # an exact zero takes the sign opposite its predecessor
        sign_cur = np.where(sign_cur == 0, -sign_prev, sign_cur)
        agree += sign_cur == sign_prev
        sign_prev = sign_cur
        big = np.maximum(np.abs(cur), np.abs(prev))
        big = np.where(big > 0, big, 1.0)
        prev2 = prev / big
        prev = cur / big
        scale = scale + np.log(big)

    if scalar:
        return CharPolySequence(mant[:, 0], logs[:, 0], int(agree[0]))
    return CharPolySequence(mant, logs, agree)


@numba.njit(cache=True, nogil=True)
def _count_below(a, b2, x, pivmin):
    n = a.shape[0]
    count = 0
    q = a[0] - x
    if abs(q) < pivmin:
        q = pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = a[i] - x - b2[i - 1] / q
        if abs(q) < pivmin:
            q = pivmin
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def _bisect_all(a, b2, lo, hi, abstol, pivmin):
    n = a.shape[0]
    out = np.empty(n)
    upper = np.full(n, hi)
    left = lo
    for k in range(n):
        right = upper[k]
        while right - left > abstol:
            mid = 0.5 * (left + right)
            if mid <= left or mid >= right:
                break
            c = _count_below(a, b2, mid, pivmin)
            if c > k:
                right = mid
                for i in range(k + 1, c):
                    if mid < upper[i]:
                        upper[i] = mid
            else:
                left = mid
        out[k] = 0.5 * (left + right)
        # the next eigenvalue keeps this bracket's left edge as a lower bound
    return out


@numba.njit(cache=True, nogil=True)
def _factor_shifted(a, b, shift, pivtol):
    """LU with partial pivoting of the tridiagonal ``T - shift*I``."""
    n = a.shape[0]
    u0 = a - shift
    u1 = np.zeros(max(n - 1, 1))
    u2 = np.zeros(max(n - 2, 1))
    mult = np.zeros(max(n - 1, 1))
    swap = np.zeros(max(n - 1, 1), dtype=np.bool_)
    for i in range(n - 1):
        u1[i] = b[i]
    for i in range(n - 1):
        sub = b[i]
        if abs(u0[i]) >= abs(sub):
            if u0[i] == 0.0:
                u0[i] = pivtol
            m = sub / u0[i]
            mult[i] = m
            u0[i + 1] = u0[i + 1] - m * u1[i]
        else:
            m = u0[i] / sub
            mult[i] = m
            swap[i] = True
            old_u1 = u1[i]
            u0[i] = sub
            u1[i] = u0[i + 1]
            u0[i + 1] = old_u1 - m * u1[i]
            if i < n - 2:
                u2[i] = u1[i + 1]
                u1[i + 1] = -m * u1[i + 1]
    for i in range(n):
        if abs(u0[i]) < pivtol:
            u0[i] = pivtol if u0[i] >= 0.0 else -pivtol
    return u0, u1, u2, mult, swap


@numba.njit(cache=True, nogil=True)
def _solve_factored(u0, u1, u2, mult, swap, rhs):
    n = u0.shape[0]
    y = rhs.copy()
    for i in range(n - 1):
        if swap[i]:
            t = y[i]
            y[i] = y[i + 1]
            y[i + 1] = t - mult[i] * y[i]
        else:
            y[i + 1] = y[i + 1] - mult[i] * y[i]
    y[n - 1] = y[n - 1] / u0[n - 1]
    if n > 1:
        y[n - 2] = (y[n - 2] - u1[n - 2] * y[n - 1]) / u0[n - 2]
    for i in range(n - 3, -1, -1):
        y[i] = (y[i] - u1[i] * y[i + 1] - u2[i] * y[i + 2]) / u0[i]
    return y


@numba.njit(cache=True, nogil=True)
def _inverse_iteration(a, b, evals, start, ortol, pivtol, n_iter):
    n = a.shape[0]
    ne = evals.shape[0]
    q = np.zeros((ne, n))
    first = 0
    for k in range(ne):
        # orthogonalise against every earlier eigenvalue within ortol
        while first < k and evals[k] - evals[first] > ortol:
            first += 1
        u0, u1, u2, mult, swap = _factor_shifted(a, b, evals[k], pivtol)
        x = start[:, k].copy()
        x /= np.sqrt(np.dot(x, x))
        for _ in range(n_iter):
            for j in range(first, k):
                x -= np.dot(q[j], x) * q[j]
            x = _solve_factored(u0, u1, u2, mult, swap, x)
            x /= np.sqrt(np.dot(x, x))
        # two Gram-Schmidt sweeps inside the window
        for _ in range(2):
            for j in range(first, k):
                x -= np.dot(q[j], x) * q[j]
            x /= np.sqrt(np.dot(x, x))
        imax = 0
        for i in range(n):
            if abs(x[i]) > abs(x[imax]):
                imax = i
        if x[imax] < 0.0:
            x = -x
        q[k] = x
    return q.T.copy()


def _pivmin(b2: np.ndarray) -> float:
    return _TINY * max(1.0, float(b2.max()) if b2.size else 1.0)


def _gershgorin(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    r = np.zeros_like(a)
    r[:-1] += np.abs(b)
    r[1:] += np.abs(b)
    return float(np.min(a - r)), float(np.max(a + r))


def sturm_count(matrix: SectorMatrix, nu: float) -> int:
    """Number of eigenvalues strictly below ``nu``."""
    total = 0
    for a, b in _blocks(matrix.diag, matrix.offdiag):
        b2 = b * b
        total += _count_below(a, b2, float(nu), _pivmin(b2))
    return total


def _blocks(diag: np.ndarray, off: np.ndarray):
    """Split at exactly-zero couplings into unreduced blocks."""
    cuts = np.flatnonzero(off == 0.0) + 1
    starts = np.concatenate(([0], cuts))
    stops = np.concatenate((cuts, [diag.shape[0]]))
    for lo, hi in zip(starts, stops):
        yield np.ascontiguousarray(diag[lo:hi]), np.ascontiguousarray(off[lo : hi - 1])


def _block_eigenvalues(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    if a.shape[0] == 1:
        return a.copy()
    lo, hi = _gershgorin(a, b)
    scale = max(1.0, abs(lo), abs(hi))
    abstol = tol * scale
    lo -= abstol
    hi += abstol
    b2 = b * b
    return _bisect_all(a, b2, lo, hi, abstol, _pivmin(b2))


def eigenvalues_bisect(matrix: SectorMatrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """All eigenvalues in ascending order, each bracketed to ``tol*max(1, radius)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    parts = [_block_eigenvalues(a, b, tol) for a, b in _blocks(matrix.diag, matrix.offdiag)]
    return np.sort(np.concatenate(parts), kind="stable")


def _start_vectors(n: int) -> np.ndarray:
    # fixed seed per dimension keeps results deterministic
    return np.random.default_rng(1000 + n).uniform(-1.0, 1.0, size=(n, n))


def _block_eigenvectors(a: np.ndarray, b: np.ndarray, evals: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1))
    lo, hi = _gershgorin(a, b)
    norm = max(abs(lo), abs(hi), _TINY)
    ortol = 1e-3 * norm
    pivtol = _EPS * norm
    return _inverse_iteration(a, b, evals, _start_vectors(n), ortol, pivtol, 3)


def eigenvector(matrix: SectorMatrix, nu: float, method: str = "inverse") -> np.ndarray:
    """Unit eigenvector for the converged eigenvalue ``nu``.

    ``method="recurrence"`` tries the forward amplitude recurrence first and
    falls back to inverse iteration when it breaks down.  The sign is fixed so
    the largest-magnitude component is positive.
    """
    if method == "recurrence":
        try:
            return eigenvector_recurrence(matrix, nu)
        except RecurrenceBreakdown:
            pass
    elif method != "inverse":
        raise ValueError(f"unknown method {method!r}")
    a, b = matrix.diag, matrix.offdiag
    if np.any(b == 0.0):
        # pick the block whose eigenvalue is closest to nu
        out = np.zeros(matrix.dim)
        best, where = np.inf, None
        start = 0
        for blk_a, blk_b in _blocks(a, b):
            vals = _block_eigenvalues(blk_a, blk_b, DEFAULT_TOL)
            gap = np.min(np.abs(vals - nu))
            if gap < best:
                best, where = gap, (start, blk_a, blk_b)
            start += blk_a.shape[0]
        start, blk_a, blk_b = where
        out[start : start + blk_a.shape[0]] = eigenvector(
            SectorMatrix(matrix.s, blk_a, blk_b), nu
        )
        return out
    if a.shape[0] == 1:
        return np.ones(1)
    return _single_inverse(a, b, float(nu))


def _single_inverse(a: np.ndarray, b: np.ndarray, nu: float) -> np.ndarray:
    lo, hi = _gershgorin(a, b)
    norm = max(abs(lo), abs(hi), _TINY)
    start = _start_vectors(a.shape[0])[:, :1].copy()
    q = _inverse_iteration(a, b, np.array([nu]), start, 0.0, _EPS * norm, 3)
    return q[:, 0]


def eigenvector_recurrence(matrix: SectorMatrix, nu: float) -> np.ndarray:
    """Eigenvector from the forward amplitude recurrence.

    Starting from the top Dicke index with amplitude 1, each row of
    ``(M - nu) c = 0`` fixes the next lower amplitude.  Unstable for clustered
    spectra; intended for small blocks.
    """
    a, b = matrix.diag, matrix.offdiag
    d = a.shape[0]
    if d == 1:
        return np.ones(1)
    scale = max(matrix.norm(), _TINY)
    if np.any(np.abs(b) <= _EPS * scale):
        raise RecurrenceBreakdown("vanishing coupling in the amplitude recurrence")
    c = np.zeros(d)
    c[d - 1] = 1.0
    c[d - 2] = -(a[d - 1] - nu) * c[d - 1] / b[d - 2]
    for k in range(d - 2, 0, -1):
        c[k - 1] = -((a[k] - nu) * c[k] + b[k] * c[k + 1]) / b[k - 1]
        if not np.isfinite(c[k - 1]):
            raise RecurrenceBreakdown("amplitude recurrence overflowed")
    c /= np.linalg.norm(c)
    imax = int(np.argmax(np.abs(c)))
    if c[imax] < 0:
        c = -c
    return c


def _rayleigh_polish(a, b, vals, vecs):
    """Replace bisected eigenvalues by Rayleigh quotients of their vectors.

    The quotient is accurate to the square of the vector error, well below the
    bisection bracket.
    """
    if a.shape[0] == 1:
        return vals, vecs
    rq = np.einsum("i,ik,ik->k", a, vecs, vecs)
    rq += 2.0 * np.einsum("i,ik,ik->k", b, vecs[:-1], vecs[1:])
    if np.all(np.diff(rq) >= 0):
        return rq, vecs
    order = np.argsort(rq, kind="stable")
    return rq[order], vecs[:, order]


def diagonalize(matrix: SectorMatrix, tol: float = DEFAULT_TOL) -> Eigensystem:
    """Eigenvalues (ascending) and orthonormal eigenvectors of one block.

    Blocks separated by exactly-zero couplings are solved independently and
    merged; equal eigenvalues keep block order.
    """
    d = matrix.dim
    shift = math.fsum(matrix.diag) / d
    diag = matrix.diag - shift
    vals_parts, vec_parts, offsets = [], [], []
    start = 0
    for a, b in _blocks(diag, matrix.offdiag):
        vals = _block_eigenvalues(a, b, tol)
        vecs = _block_eigenvectors(a, b, vals)
        vals, vecs = _rayleigh_polish(a, b, vals, vecs)
        vals_parts.append(vals)
        vec_parts.append(vecs)
        offsets.append(start)
        start += a.shape[0]
    if len(vals_parts) == 1:
        local = vals_parts[0]
        return Eigensystem(matrix.s, shift + local, vec_parts[0], shift, local)
    values = np.concatenate(vals_parts)
    order = np.argsort(values, kind="stable")
    vectors = np.zeros((d, d))
    col = 0
    for off, vecs in zip(offsets, vec_parts):
        k = vecs.shape[1]
        vectors[off : off + k, col : col + k] = vecs
        col += k
    local = values[order]
    return Eigensystem(matrix.s, shift + local, vectors[:, order], shift, local)
