"""Finitely generated abelian groups Z^f x Z_d1 x ... x Z_dk.

Elements are plain integer tuples.  Torsion coordinates are kept reduced.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import gcd, lcm, log2, prod
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import RootOfUnity

Elem = tuple


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0 or any(d < 2 for d in self.torsion):
            raise GroupError("free rank must be >= 0 and torsion orders >= 2")
        object.__setattr__(self, "_rank", self.free_rank + len(self.torsion))

    @classmethod
    def cyclic(cls, *orders: int) -> "GroupSpec":
        return cls(0, tuple(orders))

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion)

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise GroupError("infinite group")
        return self.torsion_order

    @property
    def identity(self) -> Elem:
        return (0,) * self.rank

    def reduce(self, x: Sequence[int]) -> Elem:
        x = tuple(int(v) for v in x)
        if len(x) != self.rank:
            raise GroupError(f"element {x} does not belong to {self}")
        f = self.free_rank
        return x[:f] + tuple(v % d for v, d in zip(x[f:], self.torsion))

    def validate(self, x: Sequence[int]) -> Elem:
        x = tuple(int(v) for v in x)
        if len(x) != self.rank:
            raise GroupError(f"element {x} does not belong to {self}")
        f = self.free_rank
        for v, d in zip(x[f:], self.torsion):
            if not 0 <= v < d:
                raise GroupError(f"element {x} has an unreduced torsion coordinate")
        return x

    def op(self, a: Elem, b: Elem) -> Elem:
        if len(a) != self._rank or len(b) != self._rank:
            raise GroupError("elements from different groups")
        f = self.free_rank
        if not f:
            return tuple([(x + y) % d for x, y, d in zip(a, b, self.torsion)])
        return tuple(x + y for x, y in zip(a[:f], b[:f])) + tuple(
            (x + y) % d for x, y, d in zip(a[f:], b[f:], self.torsion))

    def mul(self, *elems: Elem) -> Elem:
        out = self.identity
        for e in elems:
            out = self.op(out, e)
        return out

    def inv(self, a: Elem) -> Elem:
        if len(a) != self._rank:
            raise GroupError("element from a different group")
        f = self.free_rank
        return tuple(-x for x in a[:f]) + tuple((-x) % d for x, d in zip(a[f:], self.torsion))

    def div(self, a: Elem, b: Elem) -> Elem:
        return self.op(a, self.inv(b))

    def power(self, a: Elem, k: int) -> Elem:
        f = self.free_rank
        return tuple(k * x for x in a[:f]) + tuple((k * x) % d for x, d in zip(a[f:], self.torsion))

    def elem_order(self, a: Elem) -> int:
        """Order of a, 0 if infinite."""
        if len(a) != self.rank:
            raise GroupError("element from a different group")
        f = self.free_rank
        if any(a[:f]):
            return 0
        o = 1
        for x, d in zip(a[f:], self.torsion):
            o = lcm(o, d // gcd(d, x))
        return o

    def key(self, a: Elem) -> tuple:
        """Canonical total order: free coordinates by (|x|, positive first), torsion by value."""
        f = self.free_rank
        return tuple((abs(x), x < 0) for x in a[:f]) + tuple(a[f:])

    def elements(self) -> list[Elem]:
        if not self.is_finite:
            raise GroupError("cannot list an infinite group")
        return [tuple(x) for x in itertools.product(*(range(d) for d in self.torsion))]

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj) -> "GroupSpec":
        return cls(int(obj.get("free_rank", 0)), tuple(int(d) for d in obj.get("torsion", [])))

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "1"


def elem_op(G: GroupSpec, a: Elem, b: Elem) -> Elem:
    return G.op(G.validate(a), G.validate(b))


def elem_inv(G: GroupSpec, a: Elem) -> Elem:
    return G.inv(G.validate(a))


def elem_order(G: GroupSpec, a: Elem) -> int:
    return G.elem_order(G.validate(a))


class FiniteSubgroup:
    """A finite subgroup given by its sorted element list."""

    def __init__(self, parent: GroupSpec, elements: Iterable[Elem], generators: Sequence[Elem] = ()):
        self.parent = parent
        self.elements = tuple(sorted(set(elements), key=parent.key))
        self.generators = tuple(generators)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self._reps: dict = {}
        self._rep_list = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.index

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, FiniteSubgroup):
            return NotImplemented
        return self.parent == other.parent and self.elements == other.elements

    def __hash__(self):
        return hash((self.parent, self.elements))

    def __repr__(self):
        return f"FiniteSubgroup(order={self.order}, gens={list(self.generators)})"

    @cached_property
    def frozen(self) -> frozenset:
        return frozenset(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    def to_json(self) -> dict:
        return {"generators": [list(g) for g in self.generators]}


def subgroup_generate(G: GroupSpec, gens: Sequence[Elem]) -> FiniteSubgroup:
    gens = [G.validate(g) for g in gens]
    for g in gens:
        if G.elem_order(g) == 0:
            raise GroupError(f"generator {g} has infinite order")
    elems = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.op(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return FiniteSubgroup(G, elems, gens)


def trivial_subgroup(G: GroupSpec) -> FiniteSubgroup:
    return FiniteSubgroup(G, [G.identity], ())


def whole_group(G: GroupSpec) -> FiniteSubgroup:
    basis = []
    for i, d in enumerate(G.torsion):
        e = [0] * G.rank
        e[G.free_rank + i] = 1
        basis.append(tuple(e))
    return FiniteSubgroup(G, G.elements(), basis)


def coset_eq(G: GroupSpec, a: Elem, b: Elem, T: FiniteSubgroup) -> bool:
    return G.div(a, b) in T


def canonical_coset_rep(G: GroupSpec, a: Elem, T: FiniteSubgroup) -> Elem:
    cache = T._reps if T.parent == G else {}
    rep = cache.get(a)
    if rep is None:
        coset = [G.op(a, t) for t in T.elements]
        rep = min(coset, key=G.key)
        if T.order <= 4096:
            cache.update(dict.fromkeys(coset, rep))
    return rep


def coset_reps(G: GroupSpec, T: FiniteSubgroup) -> list[Elem]:
    """Canonical representatives of G/T in canonical order (finite G)."""
    if T.parent == G and T._rep_list is not None:
        return list(T._rep_list)
    seen = set()
    reps = []
    for g in G.elements():
        if g in seen:
            continue
        coset = [G.op(g, t) for t in T.elements]
        seen.update(coset)
        reps.append(min(coset, key=G.key))
    reps = sorted(reps, key=G.key)
    if T.parent == G:
        T._rep_list = tuple(reps)
    return reps


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Return (D, V, Vinv) with U*M*V = D for some unimodular U.

    Only the column transform is returned since callers work with row
    lattices: Z^c / rowspace(M) is isomorphic to Z^c / rowspace(D) via x -> x V.
    """
    A = [list(map(int, row)) for row in M]
    r = len(A)
    c = len(A[0]) if r else (ncols or 0)
    V = [[int(i == j) for j in range(c)] for i in range(c)]
    Vi = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(src, dst, q):
        # col_dst += q * col_src
        if q == 0:
            return
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(r, c)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, c) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            A[t], A[i] = A[i], A[t]
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, r):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    clean = False
            for j in range(t + 1, c):
                q = A[t][j] // p
                add_col(t, j, -q)
                if A[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        if t < r and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
    diag = [A[i][i] if i < r else 0 for i in range(c)]
    return diag, V, Vi


# ---------------------------------------------------------------------------
# quotient by an element of order 2


class QuotientContext:
    def __init__(self, G: GroupSpec, h: Elem):
        h = G.validate(h)
        if G.elem_order(h) != 2:
            raise GroupError(f"{h} does not have order 2")
        self.source = G
        self.h = h
        f = G.free_rank
        rel = []
        for i, d in enumerate(G.torsion):
            row = [0] * G.rank
            row[f + i] = d
            rel.append(row)
        rel.append(list(h))
        diag, V, Vi = smith_normal_form(rel)
        self._V = V
        self._Vi = Vi
        self._diag = diag
        self._free_idx = [i for i, d in enumerate(diag) if d == 0]
        self._tors_idx = [i for i, d in enumerate(diag) if d > 1]
        self.quotient = GroupSpec(len(self._free_idx), tuple(diag[i] for i in self._tors_idx))

    def project(self, g: Elem) -> Elem:
        g = self.source.validate(g)
        n = len(g)
        y = [sum(g[i] * self._V[i][j] for i in range(n)) for j in range(n)]
        return self.quotient.reduce([y[i] for i in self._free_idx] + [y[i] for i in self._tors_idx])

    def section(self, gb: Elem) -> Elem:
        gb = self.quotient.validate(gb)
        n = self.source.rank
        y = [0] * n
        for pos, i in enumerate(self._free_idx + self._tors_idx):
            y[i] = gb[pos]
        x = [sum(y[i] * self._Vi[i][j] for i in range(n)) for j in range(n)]
        return self.source.reduce(x)

    def lifts(self, gb: Elem) -> tuple[Elem, Elem]:
        s = self.section(gb)
        return s, self.source.op(s, self.h)


def quotient_by_order2(G: GroupSpec, h: Elem) -> QuotientContext:
    return QuotientContext(G, h)


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class Character:
    domain: GroupSpec
    N: int
    values: tuple  # exponent of zeta_N per coordinate generator; 0 on free ones

    def __call__(self, g: Elem) -> RootOfUnity:
        f = self.domain.free_rank
        return RootOfUnity(self.N, sum(v * x for v, x in zip(self.values[f:], g[f:])))

    def squared(self, g: Elem) -> RootOfUnity:
        return self(g) ** 2


def solve_character(G: GroupSpec, h: Elem) -> Character:
    """Canonical character with chi(h) = -1, trivial on free generators.

    Exponents are chosen lexicographically least among multiples of N/d_i.
    """
    h = G.validate(h)
    if G.elem_order(h) != 2:
        raise GroupError(f"{h} does not have order 2")
    N = lcm(2, *G.torsion) if G.torsion else 2
    f = G.free_rank
    active = [i for i, x in enumerate(h[f:]) if x]
    ranges = [range(0, N, N // G.torsion[i]) for i in active]
    for combo in itertools.product(*ranges):
        if sum(c * h[f + i] for c, i in zip(combo, active)) % N == N // 2:
            vals = [0] * G.rank
            for c, i in zip(combo, active):
                vals[f + i] = c
            return Character(G, N, tuple(vals))
    raise GroupError("no character with chi(h) = -1")  # unreachable for order-2 h


def chi_squared_on_quotient(chi: Character, q: QuotientContext, gb: Elem) -> RootOfUnity:
    return chi(q.section(gb)) ** 2


def is_elementary_2(T: FiniteSubgroup) -> bool:
    G = T.parent
    return all(G.op(t, t) == G.identity for t in T.elements)


def rank_2(T: FiniteSubgroup) -> int:
    if not is_elementary_2(T):
        raise GroupError("subgroup is not an elementary 2-group")
    return int(round(log2(T.order)))


# ---------------------------------------------------------------------------
# structure of finite subgroups


def subgroup_basis(T: FiniteSubgroup) -> list[tuple[Elem, int]]:
    """Independent generators (element, order) with T the direct product of their cyclic groups."""
    G = T.parent
    gens = [g for g in (T.generators or T.elements) if g != G.identity]
    if not gens:
        return []
    if not T.generators:
        gens = list(T.elements[1:])
    m = len(gens)
    f = G.free_rank
    k = len(G.torsion)
    # relations among the generators: project the right kernel of [A | -D]
    big = [[gens[i][f + j] for i in range(m)] + [(-G.torsion[j] if jj == j else 0) for jj in range(k)]
           for j in range(k)]
    diag, V, _ = smith_normal_form(big)
    rnk = sum(1 for d in diag if d)
    rels = [[V[i][j] for i in range(m)] for j in range(rnk, m + k)]
    rels = [r for r in rels if any(r)]
    diag2, _, Vi2 = smith_normal_form(rels, m)
    out = []
    for i in range(m):
        if diag2[i] == 1:
            continue
        coeffs = Vi2[i]
        e = G.identity
        for c, g in zip(coeffs, gens):
            e = G.op(e, G.power(g, c))
        out.append((e, G.elem_order(e)))
    out = [(e, o) for e, o in out if o > 1]
    if prod(o for _, o in out) != T.order:
        raise GroupError("basis extraction failed")
    return out


def abelian_invariants(T: FiniteSubgroup) -> dict[int, list[int]]:
    """p -> sorted list of exponents e with T = prod Z_{p^e}."""
    G = T.parent
    n = T.order
    primes = [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, int(p**0.5) + 1))]
    out = {}
    for p in primes:
        s_prev = 0
        counts = []
        k = 1
        while True:
            cnt = sum(1 for t in T.elements if G.power(t, p**k) == G.identity)
            # keep only the p-part: elements killed by p^k
            s = round(log2(cnt) / log2(p))
            if s == s_prev:
                break
            counts.append(s - s_prev)
            s_prev = s
            k += 1
        exps = []
        for e in range(len(counts)):
            ge = counts[e]
            gt = counts[e + 1] if e + 1 < len(counts) else 0
            exps += [e + 1] * (ge - gt)
        out[p] = sorted(exps)
    return out


def is_square_shape(T: FiniteSubgroup) -> bool:
    """True when T is isomorphic to A x A for some finite abelian A."""
    for exps in abelian_invariants(T).values():
        for e in set(exps):
            if exps.count(e) % 2:
                return False
    return True


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def abelian_groups_of_order(order: int) -> list[GroupSpec]:
    """One group per isomorphism type, as a product of prime-power cyclic factors."""
    if order < 1:
        raise GroupError("order must be positive")
    factors, m, p = [], order, 2
    while m > 1:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            factors.append([tuple(p ** k for k in sorted(part)) for part in _partitions(e)])
        p += 1
    return [GroupSpec(0, tuple(itertools.chain(*choice))) for choice in itertools.product(*factors)]


def group_table(G: GroupSpec) -> tuple[list[Elem], dict, np.ndarray]:
    return _group_table(G)


@lru_cache(maxsize=64)
def _group_table(G: GroupSpec):
    els = G.elements()
    idx = {e: i for i, e in enumerate(els)}
    n = len(els)
    tab = np.zeros((n, n), np.int64)
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            tab[i, j] = idx[G.op(a, b)]
    return els, idx, tab


@lru_cache(maxsize=64)
def all_subgroups(G: GroupSpec) -> tuple[FiniteSubgroup, ...]:
    """Every subgroup of a finite G, ordered by (order, element keys)."""
    els, idx, tab = _group_table(G)
    n = len(els)
    cyclic = {}
    for i in range(n):
        cur, seen = 0, [0]
        cur = i
        while cur != 0:
            seen.append(cur)
            cur = tab[cur, i]
        cyclic.setdefault(frozenset(seen), els[i])
    cyc_list = [np.array(sorted(c)) for c in cyclic]
    found = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for S in frontier:
            sarr = np.array(sorted(S))
            for c in cyc_list:
                if set(c.tolist()) <= S:
                    continue
                J = frozenset(np.unique(tab[np.ix_(sarr, c)]).tolist())
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    subs = []
    for S in found:
        elements = [els[i] for i in S]
        sub = FiniteSubgroup(G, elements)
        sub.generators = tuple(e for e, _ in subgroup_basis(FiniteSubgroup(G, elements, _small_generators(G, sub))))
        subs.append(sub)
    subs.sort(key=lambda s: (s.order, [G.key(e) for e in s.elements]))
    return tuple(subs)


def _small_generators(G: GroupSpec, S: FiniteSubgroup) -> list[Elem]:
    gens: list[Elem] = []
    span = {G.identity}
    for e in S.elements:
        if e in span:
            continue
        gens.append(e)
        span = set(subgroup_generate(G, gens).elements)
        if len(span) == S.order:
            break
    return gens
