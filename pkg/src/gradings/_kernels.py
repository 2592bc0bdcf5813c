"""Integer kernels for batched arithmetic over Q(zeta_N).

Matrices over the cyclotomic field are stored as integer arrays whose last
axis holds power-basis coefficients (see ``kmatrix.KArray``).  The hot loops
live here in two flavours: numba-compiled loops and plain numpy fallbacks.
Set ``GRADINGS_DISABLE_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import os

import numpy as np

INT64_SAFE = 2**62

_disabled = os.environ.get("GRADINGS_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by environment")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference implementations (also used for object dtype)


def kmatmul_numpy(A, B, red):
    """Batched product of coefficient matrices.

    A has shape (b, r, k, d), B has shape (b, k, c, d) and ``red`` has shape
    (d - 1, d): row j expresses x^(d + j) in the power basis.
    """
    d = A.shape[-1]
    if d == 1:
        return np.matmul(A[..., 0], B[..., 0])[..., None]
    b, r, _, _ = A.shape
    c = B.shape[2]
    wide = np.zeros((b, r, c, 2 * d - 1), dtype=A.dtype if A.dtype == object else np.int64)
    for x in range(d):
        ax = A[..., x]
        if not ax.any():
            continue
        for y in range(d):
            wide[..., x + y] += np.matmul(ax, B[..., y])
    out = wide[..., :d].copy()
    if d > 1:
        out += np.tensordot(wide[..., d:], red, axes=([3], [0]))
    return out


def pairing_numpy(A, E, N):
    """Table of a^T E b mod N for all rows a, b of A."""
    return (A @ E @ A.T) % N


# ---------------------------------------------------------------------------
# numba versions

if HAVE_NUMBA:

    @njit(cache=True)
    def _kmatmul_nb(A, B, red):
        b, r, k, d = A.shape
        c = B.shape[2]
        out = np.zeros((b, r, c, d), np.int64)
        wide = np.zeros((c, 2 * d - 1), np.int64)
        for bb in range(b):
            for i in range(r):
                wide[:, :] = 0
                # row-major accumulation so that zero entries of A skip a whole row of B
                for l in range(k):
                    for x in range(d):
                        a = A[bb, i, l, x]
                        if a == 0:
                            continue
                        for j in range(c):
                            for y in range(d):
                                wide[j, x + y] += a * B[bb, l, j, y]
                for j in range(c):
                    for x in range(d):
                        out[bb, i, j, x] = wide[j, x]
                    for e in range(d, 2 * d - 1):
                        t = wide[j, e]
                        if t != 0:
                            for x in range(d):
                                out[bb, i, j, x] += t * red[e - d, x]
        return out

    @njit(cache=True)
    def _pairing_nb(A, E, N):
        t, m = A.shape
        AE = np.zeros((t, m), np.int64)
        for i in range(t):
            for j in range(m):
                s = 0
                for l in range(m):
                    s += A[i, l] * E[l, j]
                AE[i, j] = s % N
        out = np.zeros((t, t), np.int64)
        for i in range(t):
            for j in range(t):
                s = 0
                for l in range(m):
                    s += AE[i, l] * A[j, l]
                out[i, j] = s % N
        return out


def kmatmul(A, B, red):
    """Dispatch the batched coefficient product, guarding against overflow."""
    if A.dtype == object or B.dtype == object:
        return kmatmul_numpy(A.astype(object), B.astype(object), red.astype(object))
    d = A.shape[-1]
    k = A.shape[2]
    amax = int(np.abs(A).max()) if A.size else 0
    bmax = int(np.abs(B).max()) if B.size else 0
    growth = 1 + (int(np.abs(red).sum(axis=1).max()) if red.size else 0)
    if amax * bmax * k * d * growth >= INT64_SAFE:
        return kmatmul_numpy(A.astype(object), B.astype(object), red.astype(object))
    A = np.ascontiguousarray(A, dtype=np.int64)
    B = np.ascontiguousarray(B, dtype=np.int64)
    if HAVE_NUMBA:
        return _kmatmul_nb(A, B, np.ascontiguousarray(red, dtype=np.int64))
    return kmatmul_numpy(A, B, red)


def pairing_table(A, E, N: int):
    A = np.ascontiguousarray(A, dtype=np.int64) % N
    E = np.ascontiguousarray(E, dtype=np.int64) % N
    if HAVE_NUMBA:
        return _pairing_nb(A, E, N)
    return pairing_numpy(A, E, N)
