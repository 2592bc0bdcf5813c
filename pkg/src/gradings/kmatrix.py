"""Dense arrays over Q(zeta_N) and exact linear algebra on them.

A :class:`KArray` keeps one integer numerator array with a trailing
coefficient axis and a single positive denominator.  Exact solving goes
through the realification K^r -> Q^(r*phi(N)), handed to python-flint.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

import flint
import numpy as np

from . import _kernels
from .cyclotomic import CycloNum, RootOfUnity, power_table, reduction_table, totient


def _gcd_array(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        g = 0
        for x in a.flat:
            g = gcd(g, int(x))
            if g == 1:
                break
        return g
    return int(np.gcd.reduce(np.abs(a), axis=None))


def _fit(a: np.ndarray) -> np.ndarray:
    """Return an int64 array if the values fit, else object dtype."""
    if a.dtype == object:
        if a.size == 0:
            return a.astype(np.int64)
        m = max(abs(int(x)) for x in a.flat)
        if m < _kernels.INT64_SAFE:
            return a.astype(np.int64)
    return a


class KArray:
    """Array of elements of Q(zeta_N): value = num / den, last axis = basis."""

    __slots__ = ("N", "num", "den")

    def __init__(self, N: int, num: np.ndarray, den: int = 1, *, normalize: bool = True):
        self.N = N
        self.num = num
        self.den = int(den)
        if self.num.shape[-1] != totient(N):
            raise ValueError("coefficient axis does not match conductor")
        if normalize:
            self._normalize()

    def _normalize(self):
        if self.den < 0:
            self.num = -self.num
            self.den = -self.den
        if self.den != 1:
            g = gcd(_gcd_array(self.num), self.den)
            if g > 1:
                self.num = self.num // g
                self.den //= g
        self.num = _fit(self.num)

    # construction -----------------------------------------------------------
    @property
    def d(self) -> int:
        return self.num.shape[-1]

    @property
    def shape(self) -> tuple:
        return self.num.shape[:-1]

    @classmethod
    def zeros(cls, N: int, shape) -> "KArray":
        return cls(N, np.zeros(tuple(shape) + (totient(N),), np.int64))

    @classmethod
    def identity(cls, N: int, n: int) -> "KArray":
        out = np.zeros((n, n, totient(N)), np.int64)
        out[np.arange(n), np.arange(n), 0] = 1
        return cls(N, out)

    @classmethod
    def from_int(cls, N: int, arr, den: int = 1) -> "KArray":
        arr = np.asarray(arr)
        out = np.zeros(arr.shape + (totient(N),), dtype=np.int64 if arr.dtype != object else object)
        out[..., 0] = arr
        return cls(N, out, den)

    @classmethod
    def from_roots(cls, N: int, exps, mask) -> "KArray":
        """Entries zeta_N^exps where mask is true, zero elsewhere."""
        exps = np.asarray(exps) % N
        out = power_table(N)[exps].copy()
        out[~np.asarray(mask, bool)] = 0
        return cls(N, out)

    @classmethod
    def from_entries(cls, N: int, rows) -> "KArray":
        """Build from a nested list of CycloNum / RootOfUnity / rationals."""
        shape = _nested_shape(rows)
        flat = []

        def walk(x):
            if isinstance(x, (list, tuple)):
                for y in x:
                    walk(y)
            else:
                flat.append(x)

        walk(rows)
        vals = []
        for x in flat:
            if isinstance(x, RootOfUnity):
                x = x.to_cyclo()
            if not isinstance(x, CycloNum):
                x = CycloNum(1, [Fraction(x)])
            vals.append(x)
        M = N
        for v in vals:
            M = lcm(M, v.N)
        vals = [v.lift(M) for v in vals]
        den = 1
        for v in vals:
            for c in v.coeffs:
                den = lcm(den, c.denominator)
        d = totient(M)
        out = np.zeros((len(vals), d), dtype=object)
        for i, v in enumerate(vals):
            for j, c in enumerate(v.coeffs):
                out[i, j] = c.numerator * (den // c.denominator)
        return cls(M, _fit(out.reshape(tuple(shape) + (d,))), den)

    # conversion ----------------------------------------------------------
    def lift(self, M: int) -> "KArray":
        if M == self.N:
            return self
        if M % self.N:
            raise ValueError(f"cannot lift conductor {self.N} to {M}")
        step = M // self.N
        tab = power_table(M)
        # z_N^j = z_M^(j*step)
        basis = np.stack([tab[(j * step) % M] for j in range(self.d)])  # (d_old, d_new)
        num = self.num.astype(object) if self.num.dtype == object else self.num
        return KArray(M, np.tensordot(num, basis, axes=([-1], [0])), self.den)

    def entry(self, *idx) -> CycloNum:
        v = self.num[idx]
        return CycloNum(self.N, [Fraction(int(c), self.den) for c in v], reduced=True)

    def tolist(self):
        def rec(a, idx):
            if len(idx) == len(self.shape):
                return self.entry(*idx)
            return [rec(a, idx + (i,)) for i in range(self.shape[len(idx)])]

        return rec(self.num, ())

    @staticmethod
    @lru_cache(maxsize=None)
    def _zeta_powers(N: int, d: int) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(d) / N)

    def to_complex(self) -> np.ndarray:
        num = self.num.astype(float) if self.num.dtype != object else np.array(self.num, dtype=float)
        return (num @ self._zeta_powers(self.N, self.d)) / self.den

    # structure ------------------------------------------------------------
    def __getitem__(self, idx) -> "KArray":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return KArray(self.N, self.num[idx + (Ellipsis,)] if Ellipsis not in idx else self.num[idx], self.den)

    def reshape(self, *shape) -> "KArray":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return KArray(self.N, self.num.reshape(tuple(shape) + (self.d,)), self.den, normalize=False)

    @property
    def T(self) -> "KArray":
        """Transpose of the last two matrix axes."""
        return KArray(self.N, np.swapaxes(self.num, -2, -3), self.den, normalize=False)

    def conj(self) -> "KArray":
        # z^j -> z^(-j)
        tab = power_table(self.N)
        basis = np.stack([tab[(-j) % self.N] for j in range(self.d)])
        return KArray(self.N, np.tensordot(self.num, basis, axes=([-1], [0])), self.den)

    def is_zero(self) -> bool:
        return not self.num.any()

    def nonzero_mask(self) -> np.ndarray:
        return self.num.any(axis=-1)

    # arithmetic -------------------------------------------------------------
    def _align(self, other: "KArray"):
        if self.N == other.N:
            return self, other
        M = lcm(self.N, other.N)
        return self.lift(M), other.lift(M)

    def __add__(self, other: "KArray") -> "KArray":
        a, b = self._align(other)
        L = lcm(a.den, b.den)
        return KArray(a.N, a.num * (L // a.den) + b.num * (L // b.den), L)

    def __sub__(self, other: "KArray") -> "KArray":
        a, b = self._align(other)
        L = lcm(a.den, b.den)
        return KArray(a.N, a.num * (L // a.den) - b.num * (L // b.den), L)

    def __neg__(self) -> "KArray":
        return KArray(self.N, -self.num, self.den, normalize=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KArray):
            return NotImplemented
        a, b = self._align(other)
        if a.shape != b.shape:
            return False
        return a.den == b.den and bool(np.array_equal(a.num, b.num))

    __hash__ = None

    def scale(self, c) -> "KArray":
        """Multiply every entry by a scalar (int, Fraction, CycloNum, RootOfUnity)."""
        if isinstance(c, RootOfUnity):
            c = c.to_cyclo()
        if not isinstance(c, CycloNum):
            c = CycloNum(1, [Fraction(c)])
        M = lcm(self.N, c.N)
        a = self.lift(M)
        c = c.lift(M)
        cden = 1
        for x in c.coeffs:
            cden = lcm(cden, x.denominator)
        cnum = np.array([[int(x * cden) for x in c.coeffs]], dtype=object)
        cnum = _fit(cnum)
        flat = a.num.reshape(1, -1, 1, a.d)
        prod = _kernels.kmatmul(flat, np.broadcast_to(cnum.reshape(1, 1, 1, a.d), (1, 1, 1, a.d)), reduction_table(M))
        return KArray(M, prod.reshape(a.num.shape), a.den * cden)

    def scale_each(self, exps, N: int) -> "KArray":
        """Multiply element i along axis 0 by zeta_N^exps[i]."""
        M = lcm(self.N, N)
        a = self.lift(M)
        roots = KArray.from_roots(M, np.asarray(exps) * (M // N), np.ones(len(exps), bool))
        b = a.num.shape[0]
        flat = a.num.reshape(b, -1, 1, a.d)
        prod = _kernels.kmatmul(flat, roots.num.reshape(b, 1, 1, a.d), reduction_table(M))
        return KArray(M, prod.reshape(a.num.shape), a.den)

    def __matmul__(self, other: "KArray") -> "KArray":
        return matmul(self, other)

    def trace(self) -> "KArray":
        n = self.shape[-1]
        return KArray(self.N, self.num[..., np.arange(n), np.arange(n), :].sum(axis=-2), self.den)

    def kron(self, other: "KArray") -> "KArray":
        """Kronecker product of two single matrices."""
        a, b = self._align(other)
        r1, c1 = a.shape
        r2, c2 = b.shape
        A = a.num.reshape(r1 * c1, 1, 1, a.d)
        B = b.num.reshape(1, 1, r2 * c2, a.d)
        prod = _kernels.kmatmul(np.ascontiguousarray(A.reshape(1, r1 * c1, 1, a.d)),
                                np.ascontiguousarray(B.reshape(1, 1, r2 * c2, a.d)), reduction_table(a.N))
        prod = prod.reshape(r1, c1, r2, c2, a.d).transpose(0, 2, 1, 3, 4).reshape(r1 * r2, c1 * c2, a.d)
        return KArray(a.N, prod, a.den * b.den)

    def __repr__(self):
        return f"KArray(N={self.N}, shape={self.shape}, den={self.den})"


def _nested_shape(x) -> tuple:
    shape = []
    while isinstance(x, (list, tuple)):
        shape.append(len(x))
        if not x:
            break
        x = x[0]
    return tuple(shape)


def stack(arrs: Sequence[KArray]) -> KArray:
    M = 1
    for a in arrs:
        M = lcm(M, a.N)
    arrs = [a.lift(M) for a in arrs]
    L = 1
    for a in arrs:
        L = lcm(L, a.den)
    nums = [a.num * (L // a.den) for a in arrs]
    if any(x.dtype == object for x in nums):
        nums = [x.astype(object) for x in nums]
    return KArray(M, np.stack(nums), L)


def concat(arrs: Sequence[KArray], axis: int = 0) -> KArray:
    M = 1
    for a in arrs:
        M = lcm(M, a.N)
    arrs = [a.lift(M) for a in arrs]
    L = 1
    for a in arrs:
        L = lcm(L, a.den)
    nums = [a.num * (L // a.den) for a in arrs]
    if any(x.dtype == object for x in nums):
        nums = [x.astype(object) for x in nums]
    return KArray(M, np.concatenate(nums, axis=axis), L)


def same_span(A: KArray, B: KArray) -> bool:
    """Whether the rows of A and of B span the same K-subspace."""
    ra, rb = rank(A), rank(B)
    return ra == rb and rank(concat([A, B])) == ra


def matmul(A: KArray, B: KArray) -> KArray:
    """Matrix product over the last two axes with numpy-style batch broadcasting."""
    A, B = A._align(B)
    an, bn = A.num, B.num
    if an.ndim < 3 or bn.ndim < 3:
        raise ValueError("matmul needs matrices")
    batch = np.broadcast_shapes(an.shape[:-3], bn.shape[:-3])
    r, k = an.shape[-3:-1]
    k2, c = bn.shape[-3:-1]
    if k != k2:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    a = np.broadcast_to(an, batch + an.shape[-3:]).reshape((-1, r, k, A.d))
    b = np.broadcast_to(bn, batch + bn.shape[-3:]).reshape((-1, k, c, A.d))
    out = _kernels.kmatmul(np.ascontiguousarray(a), np.ascontiguousarray(b), reduction_table(A.N))
    return KArray(A.N, out.reshape(batch + (r, c, A.d)), A.den * B.den)


# ---------------------------------------------------------------------------
# realification and exact solving


@lru_cache(maxsize=None)
def mult_tables(N: int) -> np.ndarray:
    """L[j] is the integer matrix of multiplication by z^j on coefficient vectors."""
    d = totient(N)
    tab = power_table(N)
    out = np.zeros((d, d, d), dtype=np.int64)
    for j in range(d):
        for i in range(d):
            out[j, :, i] = tab[(i + j) % N]
    return out


def realify(M: KArray) -> np.ndarray:
    """Integer matrix (r*d, c*d) representing M * den acting on column vectors."""
    r, c = M.shape
    L = mult_tables(M.N)
    if M.num.dtype == object:
        big = np.tensordot(M.num, L.astype(object), axes=([2], [0])).transpose(0, 2, 1, 3)
    else:
        big = np.einsum("ijz,zab->iajb", M.num, L)
    return big.reshape(r * M.d, c * M.d)


def _to_fmpz(a: np.ndarray) -> flint.fmpz_mat:
    r, c = a.shape
    return flint.fmpz_mat(r, c, [int(x) for x in a.flat])


def independent_rows(V: KArray) -> list[int]:
    """Indices of a maximal K-linearly independent subset of the rows, greedy in order."""
    m, D = V.shape
    if m == 0:
        return []
    # columns of realify(V^T) are z^j * v_i; pivots come in whole blocks
    R = realify(KArray(V.N, np.swapaxes(V.num, 0, 1), V.den, normalize=False))
    rref, _den, rank = _to_fmpz(R).rref()
    pivots = set()
    row = 0
    ncols = R.shape[1]
    for r in range(rank):
        while row < ncols and rref[r, row] == 0:
            row += 1
        pivots.add(row // V.d)
        row += 1
    return sorted(pivots)


def rank(V: KArray) -> int:
    if 0 in V.shape:
        return 0
    return _to_fmpz(realify(V)).rank() // V.d


def nullspace(M: KArray) -> KArray:
    """Rows spanning {x in K^c : M x = 0} (a K-basis)."""
    r, c = M.shape
    d = M.d
    if r == 0:
        out = np.zeros((c, c, d), np.int64)
        out[np.arange(c), np.arange(c), 0] = 1
        return KArray(M.N, out)
    X, nullity = _to_fmpz(realify(M)).nullspace()
    if nullity == 0:
        return KArray.zeros(M.N, (0, c))
    vecs = np.array([[int(X[i, j]) for j in range(nullity)] for i in range(c * d)], dtype=object).T
    cand = KArray(M.N, _fit(vecs.reshape(nullity, c, d)))
    keep = independent_rows(cand)
    return KArray(M.N, cand.num[keep], cand.den)


def _components(mask: np.ndarray) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column graph of a square mask."""
    n = mask.shape[0]
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rows, cols = np.nonzero(mask)
    for i, j in zip(rows.tolist(), cols.tolist()):
        a, b = find(i), find(n + j)
        if a != b:
            parent[a] = b
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for x in range(2 * n):
        g = groups.setdefault(find(x), ([], []))
        (g[0] if x < n else g[1]).append(x if x < n else x - n)
    return list(groups.values())


class SingularMatrix(ArithmeticError):
    pass


def inverse(M: KArray) -> KArray:
    """Exact inverse of a square K-matrix, splitting it into independent blocks first."""
    n = M.shape[0]
    d = M.d
    parts = []
    den = 1
    for rows, cols in _components(M.nonzero_mask()):
        if len(rows) != len(cols):
            raise SingularMatrix("matrix is singular")
        sub = KArray(M.N, M.num[np.ix_(rows, cols)], M.den, normalize=False)
        R = realify(sub)
        Q = flint.fmpq_mat(_to_fmpz(R))
        try:
            inv = Q.inv()
        except ZeroDivisionError as exc:
            raise SingularMatrix("matrix is singular") from exc
        inv_num, inv_den = inv.numer_denom()
        k = len(rows)
        # realified inverse of sub*den; first coefficient column of each block gives entries
        block = np.array([[int(inv_num[i, j * d]) for j in range(k)] for i in range(k * d)], dtype=object)
        block = block.reshape(k, d, k).transpose(0, 2, 1)  # (row, col, coeff)
        parts.append((cols, rows, block, int(inv_den)))
        den = lcm(den, int(inv_den))
    out = np.zeros((n, n, d), dtype=object)
    for cols, rows, block, bden in parts:
        out[np.ix_(cols, rows)] = block * (den // bden)
    # inverse of (num/den) is den * inverse(num)
    return KArray(M.N, _fit(out * M.den), den)
