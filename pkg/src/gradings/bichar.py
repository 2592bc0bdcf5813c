"""Alternating bicharacters on finite abelian groups.

A bicharacter is stored through an exponent matrix E on a generating list:
beta(g_i, g_j) = zeta_N^E[i, j], extended bimultiplicatively.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Sequence

import numpy as np

from . import _kernels
from .abgroup import Elem, FiniteSubgroup, GroupError, GroupSpec, subgroup_basis, subgroup_generate
from .cyclotomic import RootOfUnity

FULL_CHECK_LIMIT = 256
RADICAL_LIMIT = 4096


class BicharacterError(ValueError):
    pass


class Bicharacter:
    def __init__(self, T: FiniteSubgroup, N: int, exponents, generators: Sequence[Elem] | None = None):
        G = T.parent
        gens = [G.validate(g) for g in (T.generators if generators is None else generators)]
        if subgroup_generate(G, gens).elements != T.elements:
            raise BicharacterError("generators do not generate T")
        m = len(gens)
        E = np.array(exponents, dtype=np.int64).reshape(m, m) % N if m else np.zeros((0, 0), np.int64)
        self.T = T
        self.N = int(N)
        self.generators = tuple(gens)
        self.E = E
        self._table = None
        self._coords = self._coordinates()
        if T.order <= FULL_CHECK_LIMIT:
            if np.any(np.diag(self.table)):
                raise BicharacterError("bicharacter is not alternating")
        else:
            A = self._coords
            if np.any(np.einsum("ti,ij,tj->t", A, E, A) % N):
                raise BicharacterError("bicharacter is not alternating")

    def _coordinates(self) -> np.ndarray:
        """One exponent vector per element of T, checking well-definedness."""
        G = self.T.parent
        m = len(self.generators)
        coords = {G.identity: np.zeros(m, np.int64)}
        frontier = [G.identity]
        E, N = self.E, self.N
        while frontier:
            nxt = []
            for u in frontier:
                for j, g in enumerate(self.generators):
                    v = G.op(u, g)
                    cu = coords[u].copy()
                    cu[j] += 1
                    if v in coords:
                        r = cu - coords[v]
                        if np.any((r @ E) % N) or np.any((E @ r) % N):
                            raise BicharacterError("exponent matrix is inconsistent with generator relations")
                    else:
                        coords[v] = cu
                        nxt.append(v)
            frontier = nxt
        return np.array([coords[t] for t in self.T.elements], dtype=np.int64).reshape(self.T.order, m)

    @property
    def table(self) -> np.ndarray:
        """Exponents of beta(t_i, t_j) over the sorted elements of T."""
        if self._table is None:
            if len(self.generators) == 0:
                self._table = np.zeros((self.T.order, self.T.order), np.int64)
            else:
                self._table = _kernels.pairing_table(self._coords, self.E, self.N)
        return self._table

    def exponent(self, u: Elem, v: Elem) -> int:
        try:
            a = self._coords[self.T.index[tuple(u)]]
            b = self._coords[self.T.index[tuple(v)]]
        except KeyError as exc:
            raise BicharacterError(f"element {exc.args[0]} is not in T") from None
        return int(a @ self.E @ b) % self.N

    def __call__(self, u: Elem, v: Elem) -> RootOfUnity:
        return RootOfUnity(self.N, self.exponent(u, v))

    def inverse(self) -> "Bicharacter":
        return Bicharacter(self.T, self.N, -self.E, self.generators)

    def __eq__(self, other):
        if not isinstance(other, Bicharacter):
            return NotImplemented
        return bichar_eq(self, other)

    def __hash__(self):
        return hash(self.T)

    def __repr__(self):
        return f"Bicharacter(|T|={self.T.order}, N={self.N}, E={self.E.tolist()})"

    def canonical(self) -> "Bicharacter":
        """Same function presented on the invariant-factor basis of T with minimal N."""
        basis = [e for e, _ in subgroup_basis(self.T)]
        vals = [[Fraction(self.exponent(a, b), self.N) for b in basis] for a in basis]
        N = 1
        for row in vals:
            for v in row:
                N = N * v.denominator // gcd(N, v.denominator)
        E = [[int(v * N) % N for v in row] for row in vals]
        return Bicharacter(self.T, N, E, basis)

    def to_json(self) -> dict:
        return {"generators": [list(g) for g in self.generators], "N": self.N, "exponents": self.E.tolist()}

    @classmethod
    def from_json(cls, G: GroupSpec, obj) -> "Bicharacter":
        gens = [G.validate(g) for g in obj["generators"]]
        T = subgroup_generate(G, gens)
        return cls(T, int(obj["N"]), obj["exponents"], gens)


def trivial_bichar(T: FiniteSubgroup) -> Bicharacter:
    m = len(T.generators)
    return Bicharacter(T, 1, np.zeros((m, m), np.int64))


def bichar_eval(beta: Bicharacter, u: Elem, v: Elem) -> RootOfUnity:
    return beta(u, v)


def bichar_eq(b1: Bicharacter, b2: Bicharacter) -> bool:
    if b1.T != b2.T:
        return False
    for u in b1.generators:
        for v in b1.generators:
            if Fraction(b1.exponent(u, v), b1.N) != Fraction(b2.exponent(u, v), b2.N):
                return False
    return True


def radical(beta: Bicharacter) -> list[Elem]:
    if beta.T.order > RADICAL_LIMIT:
        raise BicharacterError("subgroup too large for a radical scan")
    A = beta._coords
    if A.shape[1] == 0:
        return list(beta.T.elements)
    hits = ~np.any((A @ beta.E.T) % beta.N, axis=1)
    return [t for t, ok in zip(beta.T.elements, hits) if ok]


def is_nondegenerate(beta: Bicharacter) -> bool:
    return len(radical(beta)) == 1


@dataclass(frozen=True)
class SymplecticBasis:
    pairs: tuple  # ((a_1, b_1), ...)
    orders: tuple  # (l_1, ...)
    values: tuple  # beta(a_i, b_i) as RootOfUnity

    @property
    def dim(self) -> int:
        return prod(self.orders)


def symplectic_basis(beta: Bicharacter) -> SymplecticBasis:
    if not is_nondegenerate(beta):
        raise BicharacterError("degenerate bicharacter has no symplectic basis")
    G = beta.T.parent
    tab = beta.table if beta.T.order <= FULL_CHECK_LIMIT * 16 else None
    idx = beta.T.index
    N = beta.N

    def ex(u, v):
        return int(tab[idx[u], idx[v]]) if tab is not None else beta.exponent(u, v)

    W = list(beta.T.elements)
    pairs, orders, values = [], [], []
    while len(W) > 1:
        ell = max(G.elem_order(t) for t in W)
        a = next(t for t in W if G.elem_order(t) == ell)
        b = next((t for t in W if N // gcd(N, ex(a, t)) == ell), None)
        if b is None:
            raise BicharacterError("restriction became degenerate")
        pairs.append((a, b))
        orders.append(ell)
        values.append(RootOfUnity(N, ex(a, b)))
        W = [t for t in W if ex(a, t) == 0 and ex(b, t) == 0]
    basis = SymplecticBasis(tuple(pairs), tuple(orders), tuple(values))
    if prod(o * o for o in orders) != beta.T.order:
        raise BicharacterError("extracted pairs do not generate T")
    return basis


def basis_coordinates(T: FiniteSubgroup, basis: SymplecticBasis) -> dict:
    """t -> (i_1, j_1, ..., i_r, j_r) with t = prod a_k^i_k b_k^j_k, 0 <= i_k, j_k < l_k."""
    G = T.parent
    out = {}
    ranges = []
    for ell in basis.orders:
        ranges += [range(ell), range(ell)]
    for exps in itertools.product(*ranges):
        t = G.identity
        for k, (a, b) in enumerate(basis.pairs):
            t = G.op(t, G.op(G.power(a, exps[2 * k]), G.power(b, exps[2 * k + 1])))
        if t in out:
            raise BicharacterError("symplectic pairs are not independent")
        out[t] = exps
    if len(out) != T.order:
        raise BicharacterError("symplectic pairs do not generate T")
    return out


def bichar_from_basis(T: FiniteSubgroup, basis: SymplecticBasis) -> Bicharacter:
    """Rebuild beta from its hyperbolic pairs (values on other cross pairs are 1)."""
    gens = [x for pair in basis.pairs for x in pair]
    N = 1
    for v in basis.values:
        N = N * v.N // gcd(N, v.N)
    m = len(gens)
    E = np.zeros((m, m), np.int64)
    for k, v in enumerate(basis.values):
        e = v.lift(N).k if N % v.N == 0 else None
        E[2 * k, 2 * k + 1] = e
        E[2 * k + 1, 2 * k] = -e
    return Bicharacter(T, max(N, 1), E, gens)


@dataclass(frozen=True)
class QuadForm:
    T: FiniteSubgroup
    values: dict  # t -> +1 / -1

    def __call__(self, t: Elem) -> int:
        return self.values[tuple(t)]


def quadratic_form_from_basis(T: FiniteSubgroup, basis: SymplecticBasis) -> QuadForm:
    """beta(t) = sigma(t, t) for the ordered-product cocycle; only for elementary 2-groups."""
    if any(o != 2 for o in basis.orders):
        raise BicharacterError("quadratic form needs an elementary 2-group")
    coords = basis_coordinates(T, basis)
    vals = {}
    for t, c in coords.items():
        s = sum(c[2 * k] * c[2 * k + 1] for k in range(len(basis.orders)))
        vals[t] = -1 if s % 2 else 1
    return QuadForm(T, vals)


def quadratic_form(beta: Bicharacter) -> QuadForm:
    return quadratic_form_from_basis(beta.T, symplectic_basis(beta))
