"""Division gradings, the graded algebras M(G, T, beta, kappa, gamma), verification.

Matrices are :class:`~gradings.kmatrix.KArray` stacks.  The standard division
grading is a tensor product of clock and shift matrices built from a
symplectic basis of (T, beta).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm
from typing import Sequence

import flint
import numpy as np

from . import kmatrix as km
from .abgroup import Elem, FiniteSubgroup, GroupError, GroupSpec
from .bichar import (Bicharacter, BicharacterError, SymplecticBasis, basis_coordinates, bichar_eq,
                     is_nondegenerate, symplectic_basis)
from .cyclotomic import CycloNum, RootOfUnity
from .kmatrix import KArray


class ParameterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# monomial helpers: M[r, cols[r]] = zeta_N^exps[r]


def _mono_mul(a, b, N):
    ca, ea = a
    cb, eb = b
    return cb[ca], (ea + eb[ca]) % N


def _mono_kron(a, b, N):
    ca, ea = a
    cb, eb = b
    l2 = len(cb)
    cols = (ca[:, None] * l2 + cb[None, :]).ravel()
    exps = ((ea[:, None] + eb[None, :]) % N).ravel()
    return cols, exps


def _mono_to_dense(monos, N: int) -> KArray:
    size = len(monos[0][0])
    exps = np.zeros((len(monos), size, size), np.int64)
    mask = np.zeros((len(monos), size, size), bool)
    rows = np.arange(size)
    for i, (c, e) in enumerate(monos):
        exps[i, rows, c] = e
        mask[i, rows, c] = True
    return KArray.from_roots(N, exps, mask)


# ---------------------------------------------------------------------------


@dataclass
class DivisionRealization:
    T: FiniteSubgroup
    beta: Bicharacter
    basis: SymplecticBasis
    ell: int
    N: int
    mats: KArray  # (|T|, ell, ell) in T.elements order
    sigma: np.ndarray  # exponents mod N: X_u X_v = zeta_N^sigma[u, v] X_uv
    coords: dict

    def X(self, t: Elem) -> KArray:
        return self.mats[self.T.index[tuple(t)]]

    def sigma_value(self, u: Elem, v: Elem) -> RootOfUnity:
        return RootOfUnity(self.N, int(self.sigma[self.T.index[tuple(u)], self.T.index[tuple(v)]]))


def standard_division_realization(T: FiniteSubgroup, beta: Bicharacter) -> DivisionRealization:
    if not bichar_eq(beta, beta) or beta.T != T:
        raise BicharacterError("bicharacter lives on a different subgroup")
    if not is_nondegenerate(beta):
        raise BicharacterError("division grading needs a nondegenerate bicharacter")
    N = max(beta.N, 1)
    if T.order == 1:
        basis = SymplecticBasis((), (), ())
        mats = KArray.identity(N, 1).reshape(1, 1, 1)
        return DivisionRealization(T, beta, basis, 1, N, mats, np.zeros((1, 1), np.int64), {T.elements[0]: ()})
    basis = symplectic_basis(beta)
    pair_monos = []
    eps_exp = []
    for (a, b), ell, val in zip(basis.pairs, basis.orders, basis.values):
        e = val.lift(N).k
        rows = np.arange(ell)
        X = (rows.copy(), ((ell - 1 - rows) * e) % N)
        Y = ((rows + 1) % ell, np.zeros(ell, np.int64))
        # measure X Y = c * Y X and orient so that the value equals beta(a, b)
        xy = _mono_mul(X, Y, N)
        yx = _mono_mul(Y, X, N)
        assert np.array_equal(xy[0], yx[0])
        c = set(((xy[1] - yx[1]) % N).tolist())
        assert len(c) == 1
        measured = c.pop()
        if measured == e:
            pair_monos.append((X, Y))
        elif measured == (-e) % N:
            pair_monos.append((Y, X))
        else:  # pragma: no cover - the clock/shift relation is fixed
            raise BicharacterError("clock/shift pair does not realize the bicharacter")
        eps_exp.append(e)
    coords = basis_coordinates(T, basis)
    ell_total = basis.dim
    monos = []
    for t in T.elements:
        c = coords[t]
        m = (np.zeros(1, np.int64), np.zeros(1, np.int64))
        for k, (Xk, Yk) in enumerate(pair_monos):
            ell = basis.orders[k]
            f = (np.arange(ell), np.zeros(ell, np.int64))
            for _ in range(c[2 * k]):
                f = _mono_mul(f, Xk, N)
            for _ in range(c[2 * k + 1]):
                f = _mono_mul(f, Yk, N)
            m = _mono_kron(m, f, N)
        monos.append(m)
    mats = _mono_to_dense(monos, N)
    # ordered-product cocycle: sigma(u, v) = prod eps_k^(-j_k i'_k)
    C = np.array([coords[t] for t in T.elements], dtype=np.int64)
    sigma = np.zeros((T.order, T.order), np.int64)
    for k, e in enumerate(eps_exp):
        sigma -= e * np.outer(C[:, 2 * k + 1], C[:, 2 * k])
    sigma %= N
    return DivisionRealization(T, beta, basis, ell_total, N, mats, sigma, coords)


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class MatrixGradingParams:
    G: GroupSpec
    T: FiniteSubgroup
    beta: Bicharacter
    kappa: tuple
    gamma: tuple
    # blocks may share a coset of T; the algebra is still well defined but is
    # no longer in the normal form used for classification
    allow_repeated_cosets: bool = False

    def __post_init__(self):
        self.kappa = tuple(int(k) for k in self.kappa)
        self.gamma = tuple(self.G.validate(g) for g in self.gamma)
        if len(self.kappa) != len(self.gamma) or not self.kappa:
            raise ParameterError("kappa and gamma must be nonempty and of equal length")
        if any(k < 1 for k in self.kappa):
            raise ParameterError("kappa entries must be positive")
        if self.T.parent != self.G or self.beta.T != self.T:
            raise ParameterError("T and beta must live in G")
        ell = isqrt(self.T.order)
        if ell * ell != self.T.order:
            raise ParameterError("|T| must be a square")
        for i, gi in enumerate(self.gamma):
            for j, gj in enumerate(self.gamma):
                if i < j and not self.allow_repeated_cosets and self.G.div(gj, gi) in self.T:
                    raise ParameterError(f"gamma entries {i} and {j} lie in the same coset of T")

    @property
    def ell(self) -> int:
        return isqrt(self.T.order)

    @property
    def n(self) -> int:
        return sum(self.kappa) * self.ell

    def __eq__(self, other):
        if not isinstance(other, MatrixGradingParams):
            return NotImplemented
        return (self.G == other.G and self.T == other.T and bichar_eq(self.beta, other.beta)
                and self.kappa == other.kappa and self.gamma == other.gamma)

    def __repr__(self):
        return (f"MatrixGradingParams(G={self.G}, |T|={self.T.order}, kappa={self.kappa}, "
                f"gamma={self.gamma})")


@dataclass(eq=False)
class GradedAlgebra:
    n: int
    G: GroupSpec
    mats: KArray  # (m, n, n)
    degrees: list
    kind: str = "associative"
    blocks: list | None = None  # Peirce layout: (start, size) per idempotent
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.mats.N

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def components(self) -> dict:
        comp: dict = {}
        for i, g in enumerate(self.degrees):
            comp.setdefault(tuple(g), []).append(i)
        return {g: comp[g] for g in sorted(comp, key=self.G.key)}

    def component(self, g) -> KArray:
        idx = self.components().get(tuple(g), [])
        return KArray(self.N, self.mats.num[idx], self.mats.den)

    def idempotents(self) -> list[KArray]:
        out = []
        for start, size in self.blocks or []:
            e = np.zeros((self.n, self.n, km.totient(self.N)), np.int64)
            e[np.arange(start, start + size), np.arange(start, start + size), 0] = 1
            out.append(KArray(self.N, e))
        return out


def component_dimension(A: GradedAlgebra, g) -> int:
    idx = A.components().get(tuple(g), [])
    if not idx:
        return 0
    sub = KArray(A.N, A.mats.num[idx].reshape(len(idx), -1, A.mats.d), A.mats.den)
    return km.rank(sub)


def support(A: GradedAlgebra) -> list:
    return [g for g in A.components() if component_dimension(A, g) > 0]


def same_grading(A: GradedAlgebra, B: GradedAlgebra) -> bool:
    """Equal as graded subspace decompositions of M_n: every component spans the same space."""
    if A.n != B.n or A.G != B.G:
        return False
    ca, cb = A.components(), B.components()
    for g in set(ca) | set(cb):
        x = A.component(g).reshape(len(ca.get(g, [])), -1)
        y = B.component(g).reshape(len(cb.get(g, [])), -1)
        if not km.same_span(x, y):
            return False
    return True


def construct_matrix_grading(p: MatrixGradingParams, D: DivisionRealization | None = None) -> GradedAlgebra:
    D = D or standard_division_realization(p.T, p.beta)
    G = p.G
    ell = D.ell
    K = sum(p.kappa)
    n = K * ell
    block_of = []
    for i, k in enumerate(p.kappa):
        block_of += [i] * k
    nT = p.T.order
    d = D.mats.d
    num = np.zeros((K, K, nT, n, n, d), dtype=D.mats.num.dtype)
    degrees = []
    for a in range(K):
        for b in range(K):
            num[a, b, :, a * ell:(a + 1) * ell, b * ell:(b + 1) * ell, :] = D.mats.num
            gi, gj = p.gamma[block_of[a]], p.gamma[block_of[b]]
            left = G.inv(gi)
            for t in p.T.elements:
                degrees.append(G.mul(left, t, gj))
    mats = KArray(D.N, num.reshape(K * K * nT, n, n, d), D.mats.den)
    blocks = []
    start = 0
    for k in p.kappa:
        blocks.append((start * ell, k * ell))
        start += k
    return GradedAlgebra(n, G, mats, degrees, "associative", blocks, {"params": p})


def expected_dimension(p: MatrixGradingParams, g) -> int:
    """Sum of k_i k_j over block pairs with g in g_i^-1 T g_j."""
    G = p.G
    total = 0
    for ki, gi in zip(p.kappa, p.gamma):
        for kj, gj in zip(p.kappa, p.gamma):
            if G.div(G.op(gi, g), gj) in p.T:
                total += ki * kj
    return total


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    ok: bool
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "stats": self.stats}


def _elem_json(g) -> list:
    return [int(x) for x in g]


def span_coordinates(V: KArray, P: KArray, pairing: str = "trace", n: int | None = None):
    """Coordinates of the rows of P in the basis given by the rows of V.

    Returns (coords, residual_ok) where coords is a KArray (rows(P), rows(V))
    and residual_ok[i] tells whether P[i] really lies in the span.  Raises
    SingularMatrix when the rows of V are dependent.
    """
    m = V.shape[0]
    if pairing == "trace":
        W = V.reshape(m, n, n).T.reshape(m, n * n)
    else:
        W = V.conj()
    gram = km.matmul(W, KArray(V.N, np.swapaxes(V.num, 0, 1), V.den, normalize=False))
    inv = km.inverse(gram)
    Wt = KArray(W.N, np.swapaxes(W.num, 0, 1), W.den, normalize=False)
    t = km.matmul(P, Wt)  # (M, m): pairings of each P row with each W row
    invT = KArray(inv.N, np.swapaxes(inv.num, 0, 1), inv.den, normalize=False)
    coords = km.matmul(t, invT)
    recon = km.matmul(coords, V)
    a, b = P._align(recon)
    L = lcm(a.den, b.den)
    diff = a.num * (L // a.den) - b.num * (L // b.den)
    residual_ok = ~np.any(diff.reshape(diff.shape[0], -1) != 0, axis=1)
    return coords, residual_ok


def _coords_any(V: KArray, P: KArray, n: int):
    try:
        return span_coordinates(V, P, "trace", n)
    except km.SingularMatrix:
        return span_coordinates(V, P, "hermitian", n)


def degree_violations(G: GroupSpec, degrees, nz: np.ndarray, resid: np.ndarray) -> np.ndarray:
    """Boolean (m, m) mask of pairs whose product has a coordinate outside degree g_a g_b or leaves the span.

    nz[a, b, c] says whether the product of basis elements a and b has a nonzero
    coordinate on basis element c.
    """
    ids: dict = {}
    deg_id = np.array([ids.setdefault(tuple(g), len(ids)) for g in degrees], np.int64)
    dlist = list(ids)
    prod_id = np.array([[ids.get(G.op(g, h), -1) for h in dlist] for g in dlist], np.int64).reshape(len(dlist), -1)
    target = prod_id[deg_id[:, None], deg_id[None, :]]
    outside = nz & (deg_id[None, None, :] != target[:, :, None])
    return np.any(outside, axis=2) | ~resid


def verify_associative_grading(A: GradedAlgebra, max_report: int = 50) -> VerificationReport:
    n, m = A.n, A.dim
    viol = []
    stats = {"n": n, "basis_size": m}
    if A.kind != "associative":
        return VerificationReport(False, [{"reason": "not an associative algebra"}], stats)
    if m != n * n:
        viol.append({"reason": "basis size differs from n^2", "basis_size": m})
    V = A.mats.reshape(m, n * n)
    prods = km.matmul(A.mats.reshape(m, 1, n, n), A.mats.reshape(1, m, n, n)).reshape(m * m, n * n)
    try:
        if m == n * n:
            # square basis: coordinates come straight from the inverse and every product lies in the span
            coords = km.matmul(prods, km.inverse(V))
            resid = np.ones(m * m, bool)
        else:
            coords, resid = _coords_any(V, prods, n)
    except km.SingularMatrix:
        viol.append({"reason": "basis matrices are linearly dependent"})
        return VerificationReport(False, viol, stats)
    bad = degree_violations(A.G, A.degrees, coords.nonzero_mask().reshape(m, m, m), resid.reshape(m, m))
    for a, b in zip(*np.nonzero(bad)):
        a, b = int(a), int(b)
        viol.append({"pair": [a, b], "degrees": [_elem_json(A.degrees[a]), _elem_json(A.degrees[b])],
                     "reason": "product leaves the component of degree gh"})
    dims = Counter(tuple(g) for g in A.degrees)
    stats["dimension_sum"] = sum(dims.values())
    stats["support_size"] = len(dims)
    stats["violations"] = len(viol)
    if stats["dimension_sum"] != n * n and not any(v.get("reason") == "basis size differs from n^2" for v in viol):
        viol.append({"reason": "component dimensions do not sum to n^2"})
    return VerificationReport(not viol, viol[:max_report], stats)


# ---------------------------------------------------------------------------
# scrambling and monomial isomorphisms


def _random_invertible(n: int, seed: int):
    while True:
        rng = np.random.default_rng(seed)
        S = rng.integers(-2, 3, size=(n, n))
        Z = flint.fmpz_mat(n, n, [int(x) for x in S.flat])
        det = int(Z.det())
        if det != 0:
            return S, Z, seed
        seed += 1


def conjugate(A: GradedAlgebra, S: KArray, S_inv: KArray, **meta) -> GradedAlgebra:
    mats = km.matmul(km.matmul(S.reshape(1, A.n, A.n), A.mats), S_inv.reshape(1, A.n, A.n))
    return GradedAlgebra(A.n, A.G, mats, list(A.degrees), A.kind, None, dict(meta))


def scramble(A: GradedAlgebra, seed: int) -> GradedAlgebra:
    """Conjugate every basis matrix by one random S with entries in {-2..2}."""
    S, Z, used = _random_invertible(A.n, seed)
    inv_num, inv_den = flint.fmpq_mat(Z).inv().numer_denom()
    Sk = KArray.from_int(A.N, S)
    Sinv = KArray.from_int(A.N, np.array([[int(inv_num[i, j]) for j in range(A.n)] for i in range(A.n)], dtype=object),
                           int(inv_den))
    return conjugate(A, Sk, Sinv, scramble_seed=used)


def apply_monomial_iso(A: GradedAlgebra, p: MatrixGradingParams, perm: Sequence[int], t_vec: Sequence[Elem],
                       g: Elem, D: DivisionRealization | None = None):
    """Transport A = M(p) along a monomial isomorphism.

    Block i of the result carries size k_perm[i] and degree
    g_perm[i] * t_perm[i] * g.  Returns (algebra, new params).
    """
    G = p.G
    s = len(p.kappa)
    perm = [int(x) for x in perm]
    if sorted(perm) != list(range(s)) or len(t_vec) != s:
        raise ParameterError("permutation and t-vector must match the number of blocks")
    t_vec = [G.validate(t) for t in t_vec]
    if any(t not in p.T for t in t_vec):
        raise ParameterError("t-vector entries must lie in T")
    g = G.validate(g)
    D = D or standard_division_realization(p.T, p.beta)
    ell = D.ell
    n = p.n
    K = sum(p.kappa)
    offs = np.cumsum((0,) + p.kappa)
    # B: block diagonal of X_{t_j}^{-1} over the original blocks
    Bm = KArray.zeros(D.N, (n, n))
    Bnum = Bm.num.astype(object)
    Bden = 1
    parts = []
    for j in range(s):
        Xi = km.inverse(D.X(t_vec[j]))
        parts.append(Xi)
        Bden = lcm(Bden, Xi.den)
    for j in range(s):
        Xi = parts[j]
        for c in range(offs[j], offs[j + 1]):
            Bnum[c * ell:(c + 1) * ell, c * ell:(c + 1) * ell] = Xi.num * (Bden // Xi.den)
    B = KArray(D.N, km._fit(Bnum), Bden)
    # P: tilde block i (size k_perm[i]) -> original block perm[i]
    new_kappa = tuple(p.kappa[perm[i]] for i in range(s))
    new_offs = np.cumsum((0,) + new_kappa)
    Pm = np.zeros((n, n), np.int64)
    for i in range(s):
        src = perm[i]
        for r in range(new_kappa[i]):
            orow = (offs[src] + r) * ell
            ncol = (new_offs[i] + r) * ell
            Pm[orow:orow + ell, ncol:ncol + ell] = np.eye(ell, dtype=np.int64)
    P = KArray.from_int(D.N, Pm)
    Q = km.matmul(B, P)
    Qi = km.inverse(Q)
    new_gamma = tuple(G.mul(p.gamma[perm[i]], t_vec[perm[i]], g) for i in range(s))
    new_p = MatrixGradingParams(G, p.T, p.beta, new_kappa, new_gamma)
    out = conjugate(A, Qi, Q, monomial=True)
    new_blocks = [(int(new_offs[i]) * ell, new_kappa[i] * ell) for i in range(s)]
    out.blocks = new_blocks
    out.meta["params"] = new_p
    return out, new_p
