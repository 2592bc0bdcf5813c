"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored in the power basis 1, z, ..., z^(phi(N)-1) modulo the
N-th cyclotomic polynomial, with :class:`fractions.Fraction` coefficients.
Mixed conductors are lifted to their lcm on the fly by the operator
overloads; :func:`field_arithmetic` is the strict variant.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

import mpmath
import numpy as np

Rational = Fraction


class ConductorMismatch(ValueError):
    pass


def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # ascending coefficient lists; den is monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return quot, num[:dd] or [0]


@lru_cache(maxsize=None)
def _cyclo(N: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (N - 1) + [1]  # x^N - 1
    for d in range(1, N):
        if N % d == 0:
            poly, rem = _poly_divmod(poly, list(_cyclo(d)))
            assert not any(rem)
    return tuple(poly)


def cyclotomic_polynomial(N: int) -> list[int]:
    """Coefficients of the N-th cyclotomic polynomial, lowest degree first."""
    if N < 1:
        raise ValueError("N must be positive")
    return list(_cyclo(N))


@lru_cache(maxsize=None)
def power_table(N: int) -> np.ndarray:
    """Row k is the coefficient vector of z^k, for 0 <= k < N (integers)."""
    phi = _cyclo(N)
    d = len(phi) - 1
    rows = np.zeros((max(N, 2 * d), d), dtype=np.int64)
    cur = [0] * d
    cur[0] = 1
    for k in range(rows.shape[0]):
        rows[k] = cur
        # multiply by x and reduce
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(d):
                cur[j] -= top * phi[j]
    rows.setflags(write=False)
    return rows


def reduction_table(N: int) -> np.ndarray:
    """Rows express x^d, ..., x^(2d-2) in the power basis (d = phi(N))."""
    d = totient(N)
    return power_table(N)[d:2 * d - 1]


@lru_cache(maxsize=None)
def _ntrace_basis(N: int) -> tuple[Fraction, ...]:
    # normalized trace Tr(z^j)/phi(N) = mu(N/g)/phi(N/g), g = gcd(N, j)
    out = []
    for j in range(totient(N)):
        m = N // gcd(N, j)
        out.append(Fraction(_moebius(m), totient(m)))
    return tuple(out)


def _moebius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


def _reduce(poly: Sequence, N: int) -> list:
    """Reduce an arbitrary polynomial in z (ascending) modulo Phi_N."""
    d = totient(N)
    out = [Fraction(0)] * d
    table = power_table(N)
    for k, c in enumerate(poly):
        if not c:
            continue
        if k < d:
            out[k] += c
            continue
        row = table[k % N] if k >= table.shape[0] else table[k]
        for j in range(d):
            if row[j]:
                out[j] += c * int(row[j])
    return out


class CycloNum:
    """An element of Q(zeta_N) in the power basis modulo Phi_N."""

    __slots__ = ("N", "coeffs", "_hash")

    def __init__(self, N: int, coeffs: Iterable = (), *, reduced: bool = False):
        if N < 1:
            raise ValueError("conductor must be positive")
        d = totient(N)
        cs = [Fraction(c) for c in coeffs]
        if not reduced:
            cs = _reduce(cs, N) if len(cs) > d else cs + [Fraction(0)] * (d - len(cs))
        if len(cs) != d:
            raise ValueError(f"expected {d} coefficients for N={N}")
        self.N = N
        self.coeffs = tuple(cs)
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, N: int = 1) -> "CycloNum":
        return cls(N, [])

    @classmethod
    def one(cls, N: int = 1) -> "CycloNum":
        return cls(N, [1])

    @classmethod
    def rational(cls, q, N: int = 1) -> "CycloNum":
        return cls(N, [q])

    @classmethod
    def zeta(cls, N: int, k: int = 1) -> "CycloNum":
        row = power_table(N)[k % N]
        return cls(N, [int(c) for c in row], reduced=True)

    # structure ------------------------------------------------------------
    def lift(self, M: int) -> "CycloNum":
        if M == self.N:
            return self
        if M % self.N:
            raise ConductorMismatch(f"cannot lift conductor {self.N} to {M}")
        step = M // self.N
        poly = [Fraction(0)] * ((len(self.coeffs) - 1) * step + 1)
        for j, c in enumerate(self.coeffs):
            poly[j * step] = c
        return CycloNum(M, _reduce(poly, M), reduced=True)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def conj(self) -> "CycloNum":
        poly = [Fraction(0)] * self.N
        for j, c in enumerate(self.coeffs):
            poly[(-j) % self.N] += c
        return CycloNum(self.N, _reduce(poly, self.N), reduced=True)

    def normalized_trace(self) -> Fraction:
        """Tr(a)/[Q(zeta_N):Q]; independent of the conductor used."""
        return sum((c * t for c, t in zip(self.coeffs, _ntrace_basis(self.N))), Fraction(0))

    # arithmetic -----------------------------------------------------------
    def _common(self, other):
        if isinstance(other, RootOfUnity):
            other = other.to_cyclo()
        elif not isinstance(other, CycloNum):
            other = CycloNum(self.N, [Fraction(other)])
        if other.N == self.N:
            return self, other
        M = lcm(self.N, other.N)
        return self.lift(M), other.lift(M)

    def __add__(self, other):
        a, b = self._common(other)
        return CycloNum(a.N, [x + y for x, y in zip(a.coeffs, b.coeffs)], reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.N, [-x for x in self.coeffs], reduced=True)

    def __sub__(self, other):
        a, b = self._common(other)
        return CycloNum(a.N, [x - y for x, y in zip(a.coeffs, b.coeffs)], reduced=True)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        d = len(a.coeffs)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return CycloNum(a.N, _reduce(prod, a.N), reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        d = len(self.coeffs)
        # columns of the multiplication-by-self matrix are self * z^j
        cols = []
        for j in range(d):
            cols.append((self * CycloNum.zeta(self.N, j)).coeffs)
        aug = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if aug[r][c])
            aug[c], aug[piv] = aug[piv], aug[c]
            pv = aug[c][c]
            aug[c] = [v / pv for v in aug[c]]
            for r in range(d):
                if r != c and aug[r][c]:
                    f = aug[r][c]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[c])]
        return CycloNum(self.N, [aug[i][d] for i in range(d)], reduced=True)

    def __truediv__(self, other):
        a, b = self._common(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = CycloNum.one(self.N), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (CycloNum, RootOfUnity, int, Fraction)):
            a, b = self._common(other)
            return a.coeffs == b.coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.normalized_trace(), (self * self.conj()).normalized_trace()))
        return self._hash

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z{self.N}^{j}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "CycloNum":
        return cls(int(obj["N"]), [Fraction(int(a), int(b)) for a, b in obj["coeffs"]])


@dataclass(frozen=True, eq=False)
class RootOfUnity:
    """zeta_N^k, compared by value."""

    N: int
    k: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "k", self.k % self.N)

    @property
    def angle(self) -> Fraction:
        return Fraction(self.k, self.N)

    def order(self) -> int:
        return self.N // gcd(self.N, self.k)

    def reduced(self) -> "RootOfUnity":
        g = gcd(self.N, self.k)
        return RootOfUnity(self.N // g, self.k // g)

    def to_cyclo(self, N: int | None = None) -> CycloNum:
        M = self.N if N is None else N
        if M % self.N:
            raise ConductorMismatch(f"zeta_{self.N} is not in Q(zeta_{M})")
        return CycloNum.zeta(M, self.k * (M // self.N))

    def lift(self, M: int) -> "RootOfUnity":
        if M % self.N:
            raise ConductorMismatch(f"cannot lift {self.N} to {M}")
        return RootOfUnity(M, self.k * (M // self.N))

    def __mul__(self, other):
        if isinstance(other, RootOfUnity):
            M = lcm(self.N, other.N)
            return RootOfUnity(M, self.k * (M // self.N) + other.k * (M // other.N))
        return self.to_cyclo() * other

    __rmul__ = __mul__

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(self.N, -self.k)

    def __truediv__(self, other):
        if isinstance(other, RootOfUnity):
            return self * other.inverse()
        return self.to_cyclo() / other

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.N, self.k * e)

    def __neg__(self) -> "RootOfUnity":
        return self * RootOfUnity(2, 1)

    def __eq__(self, other):
        if isinstance(other, RootOfUnity):
            return self.angle == other.angle
        if isinstance(other, (CycloNum, int, Fraction)):
            return self.to_cyclo() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_cyclo())

    def sign(self) -> int:
        """+1 or -1 for real roots, otherwise ValueError."""
        if self.angle == 0:
            return 1
        if self.angle == Fraction(1, 2):
            return -1
        raise ValueError(f"{self} is not real")

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.k / self.N)

    def __repr__(self):
        return f"zeta_{self.N}^{self.k}"

    def to_json(self) -> dict:
        return {"N": self.N, "k": self.k}

    @classmethod
    def from_json(cls, obj) -> "RootOfUnity":
        return cls(int(obj["N"]), int(obj["k"]))

    @classmethod
    def from_sign(cls, s: int) -> "RootOfUnity":
        if s not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return cls(2, 0 if s == 1 else 1)


def field_arithmetic(op: str, a: CycloNum, b: CycloNum | None = None):
    """Strict field operation: operands must share a conductor."""
    if b is not None and b.N != a.N:
        raise ConductorMismatch(f"conductors {a.N} and {b.N} differ")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "eq":
        return a == b
    raise ValueError(f"unknown operation {op!r}")


@lru_cache(maxsize=None)
def _root_lookup(N: int) -> dict:
    table = power_table(N)
    return {tuple(int(x) for x in table[k]): k for k in range(N)}


def as_root_of_unity(a: CycloNum) -> RootOfUnity | None:
    """Return zeta_M^k equal to a, where M is N (or 2N for odd N), else None."""
    if any(c.denominator != 1 for c in a.coeffs):
        return None
    key = tuple(int(c) for c in a.coeffs)
    k = _root_lookup(a.N).get(key)
    if k is not None:
        return RootOfUnity(a.N, k)
    if a.N % 2:
        # Q(zeta_N) = Q(zeta_2N) for odd N; -zeta_N^k may still be a root
        k = _root_lookup(a.N).get(tuple(-x for x in key))
        if k is not None:
            return RootOfUnity(2 * a.N, 2 * k + a.N)
    return None


def to_complex(a: CycloNum, precision: int = 15):
    """Evaluate under z -> exp(2 pi i / N).

    Returns a Python complex for precision <= 15 and an mpmath mpc otherwise.
    """
    with mpmath.workdps(precision + 10):
        z = mpmath.exp(2j * mpmath.pi / a.N)
        acc = mpmath.mpc(0)
        zk = mpmath.mpc(1)
        for c in a.coeffs:
            if c:
                acc += mpmath.mpf(c.numerator) / c.denominator * zk
            zk *= z
        if precision <= 15:
            return complex(acc)
        return +acc
