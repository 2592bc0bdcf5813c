"""Anti-automorphisms and involutions compatible with a matrix grading.

An anti-automorphism is stored as the matrix Phi of a bilinear form:
phi(X) = Phi^-1 X^t Phi.  Blocks of Phi follow the idempotent layout
(single blocks, doubled blocks, swapped pairs).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Sequence

import numpy as np

from . import kmatrix as km
from .abgroup import Elem, FiniteSubgroup, GroupSpec, is_elementary_2
from .bichar import Bicharacter, quadratic_form
from .cyclotomic import CycloNum, RootOfUnity
from .graded_matrix import (DivisionRealization, GradedAlgebra, MatrixGradingParams, ParameterError,
                            VerificationReport, construct_matrix_grading, span_coordinates,
                            standard_division_realization, _coords_any, _elem_json)
from .kmatrix import KArray


@dataclass(eq=False)
class StructuredKappaGamma:
    """Block data in the order: l odd singles, m - l doubled singles, k - m swapped pairs."""

    ell: int
    m: int
    k: int
    q: tuple
    gamma_single: tuple  # m entries
    gamma_pairs: tuple  # k - m pairs (g', g'')

    def __post_init__(self):
        self.q = tuple(int(x) for x in self.q)
        self.gamma_single = tuple(tuple(int(v) for v in g) for g in self.gamma_single)
        self.gamma_pairs = tuple((tuple(int(v) for v in a), tuple(int(v) for v in b)) for a, b in self.gamma_pairs)
        if not 0 <= self.ell <= self.m <= self.k:
            raise ParameterError("need 0 <= ell <= m <= k")
        if len(self.q) != self.k or any(x < 1 for x in self.q):
            raise ParameterError("q must list k positive integers")
        if any(x % 2 == 0 for x in self.q[:self.ell]):
            raise ParameterError("q_1..q_ell must be odd")
        if len(self.gamma_single) != self.m or len(self.gamma_pairs) != self.k - self.m:
            raise ParameterError("gamma does not match ell, m, k")

    def kappa(self) -> tuple:
        out = list(self.q[:self.ell]) + [2 * x for x in self.q[self.ell:self.m]]
        for x in self.q[self.m:]:
            out += [x, x]
        return tuple(out)

    def gamma(self) -> tuple:
        out = list(self.gamma_single)
        for a, b in self.gamma_pairs:
            out += [a, b]
        return tuple(out)

    def matrix_params(self, G: GroupSpec, T: FiniteSubgroup, beta: Bicharacter) -> MatrixGradingParams:
        gamma = tuple(G.validate(g) for g in self.gamma())
        repeated = any(G.div(a, b) in T for a, b in self.gamma_pairs)
        return MatrixGradingParams(G, T, beta, self.kappa(), gamma, allow_repeated_cosets=repeated)

    def with_pairs(self, pairs) -> "StructuredKappaGamma":
        return StructuredKappaGamma(self.ell, self.m, self.k, self.q, self.gamma_single, tuple(pairs))

    def to_json(self) -> dict:
        return {"ell": self.ell, "m": self.m, "k": self.k, "q": list(self.q),
                "gamma_single": [list(g) for g in self.gamma_single],
                "gamma_pairs": [[list(a), list(b)] for a, b in self.gamma_pairs]}

    def __eq__(self, other):
        if not isinstance(other, StructuredKappaGamma):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.ell, self.m, self.k, self.q, self.gamma_single, self.gamma_pairs))


@dataclass(frozen=True)
class AdmissibleOption:
    common: Elem  # exact value of g_i^2 t_i (and of g' g'' after normalization)
    tau: tuple  # t_1..t_m
    delta: int | None  # forced sign when ell > 0


def _squares_and_products(G: GroupSpec, sg: StructuredKappaGamma) -> list:
    vals = [G.op(g, g) for g in sg.gamma_single]
    vals += [G.op(a, b) for a, b in sg.gamma_pairs]
    return vals


def admissible_options(G: GroupSpec, T: FiniteSubgroup, beta: Bicharacter, sg: StructuredKappaGamma) -> list:
    """Every choice of common value c satisfying the admissibility conditions.

    For m > 0 the value c fixes tau through t_i = g_i^-2 c.  For m = 0 the
    value c is the exact product g' g'' after normalization.
    """
    if not is_elementary_2(T):
        return []
    vals = _squares_and_products(G, sg)
    if not vals:
        return []
    base = vals[0]
    if any(G.div(v, base) not in T for v in vals):
        return []
    Q = quadratic_form(beta)
    out = []
    for t in T.elements:
        c = G.op(base, t)
        tau = tuple(G.div(c, G.op(g, g)) for g in sg.gamma_single)
        signs = {Q(t_i) for t_i in tau[:sg.ell]}
        if len(signs) > 1:
            continue
        out.append(AdmissibleOption(c, tau, signs.pop() if signs else None))
    return out


def check_star_admissible(G: GroupSpec, T: FiniteSubgroup, beta: Bicharacter, sg: StructuredKappaGamma):
    """Return (tau prefix, forced delta) for the least admissible choice, or None."""
    opts = admissible_options(G, T, beta, sg)
    if not opts:
        return None
    best = min(opts, key=lambda o: G.key(o.common))
    return best.tau, best.delta


def normalize_to_eq8(G: GroupSpec, sg: StructuredKappaGamma, tau_full: Sequence[Elem]) -> StructuredKappaGamma:
    """Replace g''_i by g''_i t_i for the paired blocks."""
    if len(tau_full) != sg.k:
        raise ParameterError("tau must have k entries")
    pairs = []
    for (a, b), t in zip(sg.gamma_pairs, tau_full[sg.m:]):
        pairs.append((a, G.op(b, G.validate(t))))
    return sg.with_pairs(pairs)


def common_value(G: GroupSpec, sg: StructuredKappaGamma, tau: Sequence[Elem]) -> Elem | None:
    """The exact common value of g_i^2 t_i and g'_i g''_i, or None if they differ."""
    vals = [G.mul(g, g, t) for g, t in zip(sg.gamma_single, tau)]
    vals += [G.op(a, b) for a, b in sg.gamma_pairs]
    return vals[0] if vals and all(v == vals[0] for v in vals) else None


def pair_normalizing_tau(G: GroupSpec, sg: StructuredKappaGamma, c: Elem) -> tuple:
    """t_{m+1}..t_k with g'_i g''_i t_i = c."""
    return tuple(G.div(c, G.op(a, b)) for a, b in sg.gamma_pairs)


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class GradedAlgebraWithAntiAut:
    R: GradedAlgebra
    Phi: KArray
    Phi_inv: KArray
    kind: str = "involution"
    meta: dict = field(default_factory=dict)

    def apply(self, X: KArray) -> KArray:
        """phi applied to a stack (..., n, n)."""
        n = self.R.n
        lead = X.shape[:-2]
        flat = X.reshape((-1, n, n)).T
        out = km.matmul(km.matmul(self.Phi_inv.reshape(1, n, n), flat), self.Phi.reshape(1, n, n))
        return out.reshape(lead + (n, n))


def _sign_block(q: int, sign: int) -> np.ndarray:
    if sign == 1:
        return np.eye(2 * q, dtype=np.int64)
    J = np.zeros((2 * q, 2 * q), np.int64)
    J[:q, q:] = np.eye(q, dtype=np.int64)
    J[q:, :q] = -np.eye(q, dtype=np.int64)
    return J


def _assemble_phi(D: DivisionRealization, sg: StructuredKappaGamma, tau: Sequence[Elem], s_signs: Sequence[int],
                  mus: Sequence[CycloNum]) -> KArray:
    ell_d = D.ell
    n = sum(sg.kappa()) * ell_d
    N = D.N
    for mu in mus:
        N = lcm(N, mu.N)
    parts = []  # (offset, KArray block)
    off = 0
    for i in range(sg.ell):
        blk = KArray.from_int(N, np.eye(sg.q[i], dtype=np.int64)).kron(D.X(tau[i]).lift(N))
        parts.append((off, blk))
        off += blk.shape[0]
    for i in range(sg.ell, sg.m):
        S = KArray.from_int(N, _sign_block(sg.q[i], s_signs[i - sg.ell]))
        blk = S.kron(D.X(tau[i]).lift(N))
        parts.append((off, blk))
        off += blk.shape[0]
    for j, i in enumerate(range(sg.m, sg.k)):
        q = sg.q[i]
        top = np.zeros((2 * q, 2 * q), np.int64)
        top[:q, q:] = np.eye(q, dtype=np.int64)
        low = np.zeros((2 * q, 2 * q), np.int64)
        low[q:, :q] = np.eye(q, dtype=np.int64)
        S = KArray.from_int(N, top) + KArray.from_int(N, low).scale(mus[j])
        blk = S.kron(KArray.identity(N, ell_d))
        parts.append((off, blk))
        off += blk.shape[0]
    assert off == n
    den = 1
    for _, b in parts:
        den = lcm(den, b.den)
    num = np.zeros((n, n, parts[0][1].d), dtype=object)
    for o, b in parts:
        s = b.shape[0]
        num[o:o + s, o:o + s] = b.lift(N).num * (den // b.den)
    return KArray(N, km._fit(num), den)


def _division(T, beta):
    return standard_division_realization(T, beta)


def build_anti_automorphism(G: GroupSpec, T: FiniteSubgroup, beta: Bicharacter, sg: StructuredKappaGamma,
                            tau: Sequence[Elem], mus: Sequence, s_signs: Sequence[int] | None = None,
                            ) -> GradedAlgebraWithAntiAut:
    if not is_elementary_2(T):
        raise ParameterError("the division part admits an anti-automorphism only for elementary 2-groups")
    tau = tuple(G.validate(t) for t in tau)
    if len(tau) != sg.m or any(t not in T for t in tau):
        raise ParameterError("tau must list m elements of T")
    if common_value(G, sg, tau) is None:
        raise ParameterError("gamma and tau do not satisfy g_i^2 t_i = g'_j g''_j; normalize first")
    mus = [m.to_cyclo() if isinstance(m, RootOfUnity) else (m if isinstance(m, CycloNum) else CycloNum.rational(m))
           for m in mus]
    if len(mus) != sg.k - sg.m:
        raise ParameterError("need one mu per paired block")
    if any(m.is_zero() for m in mus):
        raise ParameterError("mu values must be nonzero")
    s_signs = tuple(s_signs) if s_signs is not None else (1,) * (sg.m - sg.ell)
    if len(s_signs) != sg.m - sg.ell or any(s not in (1, -1) for s in s_signs):
        raise ParameterError("need one sign per doubled block")
    p = sg.matrix_params(G, T, beta)
    D = _division(T, beta)
    R = construct_matrix_grading(p, D)
    Phi = _assemble_phi(D, sg, tau, s_signs, mus)
    return GradedAlgebraWithAntiAut(R, Phi, km.inverse(Phi), "anti-automorphism",
                                    {"structure": sg, "tau": tau, "mu": mus, "s_signs": s_signs, "T": T, "beta": beta})


def build_involution(G: GroupSpec, T: FiniteSubgroup, beta: Bicharacter, sg: StructuredKappaGamma,
                     tau: Sequence[Elem], delta: int) -> GradedAlgebraWithAntiAut:
    """The graded algebra with involution of sign delta.  gamma and tau must already satisfy the exact equalities."""
    if delta not in (1, -1):
        raise ParameterError("delta must be +1 or -1")
    if not is_elementary_2(T):
        raise ParameterError("involutions need T elementary 2")
    tau = tuple(G.validate(t) for t in tau)
    if len(tau) != sg.m:
        raise ParameterError("tau must have m entries")
    Q = quadratic_form(beta)
    for i in range(sg.ell):
        if Q(tau[i]) != delta:
            raise ParameterError(f"sign condition fails: beta(t_{i + 1}) = {Q(tau[i])} but delta = {delta}")
    s_signs = tuple(delta * Q(tau[i]) for i in range(sg.ell, sg.m))
    mus = [CycloNum.rational(delta)] * (sg.k - sg.m)
    out = build_anti_automorphism(G, T, beta, sg, tau, mus, s_signs)
    out.kind = "involution"
    out.meta["delta"] = delta
    return out


# ---------------------------------------------------------------------------


def verify_involution(A: GradedAlgebraWithAntiAut, max_report: int = 50) -> VerificationReport:
    R = A.R
    n, m = R.n, R.dim
    viol = []
    V = R.mats.reshape(m, n * n)
    images = A.apply(R.mats)
    try:
        coords, resid = _coords_any(V, images.reshape(m, n * n), n)
    except km.SingularMatrix:
        return VerificationReport(False, [{"reason": "basis matrices are linearly dependent"}], {})
    nz = coords.nonzero_mask()
    for a in range(m):
        same = np.array([R.degrees[b] == R.degrees[a] for b in range(m)])
        if not resid[a] or np.any(nz[a] & ~same):
            viol.append({"index": a, "degree": _elem_json(R.degrees[a]), "reason": "phi moves the component"})
    prods = km.matmul(R.mats.reshape(m, 1, n, n), R.mats.reshape(1, m, n, n))
    lhs = A.apply(prods)
    rhs = km.matmul(images.reshape(1, m, n, n), images.reshape(m, 1, n, n))
    diff = (lhs - rhs).nonzero_mask().reshape(m, m, -1).any(axis=-1)
    for a, b in zip(*np.nonzero(diff)):
        viol.append({"pair": [int(a), int(b)], "reason": "phi(XY) differs from phi(Y)phi(X)"})
    if A.kind == "involution":
        twice = A.apply(images)
        bad = (twice - R.mats).nonzero_mask().reshape(m, -1).any(axis=-1)
        for a in np.nonzero(bad)[0]:
            viol.append({"index": int(a), "reason": "phi^2 differs from the identity"})
    else:
        # phi^2 must fix the identity component
        twice = A.apply(images)
        bad = (twice - R.mats).nonzero_mask().reshape(m, -1).any(axis=-1)
        e = R.G.identity
        for a in np.nonzero(bad)[0]:
            if R.degrees[a] == e:
                viol.append({"index": int(a), "reason": "phi^2 moves the identity component"})
    stats = {"n": n, "basis_size": m, "violations": len(viol)}
    return VerificationReport(not viol, viol[:max_report], stats)


def involution_sign(A: GradedAlgebraWithAntiAut) -> int:
    if A.kind != "involution":
        raise ParameterError("sign is defined for involutions only")
    if A.Phi.T == A.Phi:
        return 1
    if A.Phi.T == -A.Phi:
        return -1
    raise ParameterError("Phi is neither symmetric nor skew; not an involution")


def with_phi(A: GradedAlgebraWithAntiAut, Phi: KArray, kind: str | None = None) -> GradedAlgebraWithAntiAut:
    """Same algebra with a different form matrix (used to inject faults in tests)."""
    return GradedAlgebraWithAntiAut(A.R, Phi, km.inverse(Phi), kind or A.kind, dict(A.meta))


@dataclass(eq=False)
class InvolutionParams:
    """Classification data of a graded matrix algebra with involution."""

    G: GroupSpec
    T: FiniteSubgroup
    beta: Bicharacter
    structure: StructuredKappaGamma
    tau: tuple
    delta: int

    def __post_init__(self):
        self.tau = tuple(self.G.validate(t) for t in self.tau)

    @property
    def n(self) -> int:
        return sum(self.structure.kappa()) * int(round(self.T.order ** 0.5))

    def build(self) -> GradedAlgebraWithAntiAut:
        return build_involution(self.G, self.T, self.beta, self.structure, self.tau, self.delta)
