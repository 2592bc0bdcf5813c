"""Gradings on sl_n, so_n and sp_n realized inside graded matrix algebras.

Type I gradings on sl_n are the trace-zero parts of associative gradings.
Type II gradings come from a grading by G/<h> together with an
anti-automorphism phi whose square acts as chi^2; the G-components are the
eigenspaces of -phi.  Orthogonal and symplectic algebras are the phi-skew
parts of graded algebras with involution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kmatrix as km
from .abgroup import (Character, Elem, FiniteSubgroup, GroupError, GroupSpec, QuotientContext, is_elementary_2,
                      rank_2, solve_character, subgroup_generate)
from .bichar import Bicharacter, quadratic_form, trivial_bichar
from .cyclotomic import CycloNum, RootOfUnity
from .graded_matrix import (GradedAlgebra, MatrixGradingParams, ParameterError, VerificationReport, _coords_any,
                            _elem_json, degree_violations, construct_matrix_grading, standard_division_realization)
from .involution import (GradedAlgebraWithAntiAut, StructuredKappaGamma, _assemble_phi, build_involution,
                         common_value)
from .kmatrix import KArray

VARIANTS = ("A_I", "A_II1", "A_II2", "A_II3", "B", "C", "D")
INCOMPLETE = "classification-incomplete"


# ---------------------------------------------------------------------------
# Type II context


class TypeIIContext:
    """G with a distinguished h of order 2, an elementary 2-subgroup H of odd rank and the character chi."""

    def __init__(self, G: GroupSpec, h: Elem, H: FiniteSubgroup, chi: Character | None = None):
        h = G.validate(h)
        if G.elem_order(h) != 2:
            raise ParameterError("h must have order 2")
        if H.parent != G or h not in H:
            raise ParameterError("h must lie in H")
        if not is_elementary_2(H):
            raise ParameterError("H must be an elementary 2-group")
        if rank_2(H) % 2 != 1:
            raise ParameterError("H must have odd rank")
        self.G, self.h, self.H = G, h, H
        self.quotient = QuotientContext(G, h)
        self.Gbar = self.quotient.quotient
        self.chi = chi or solve_character(G, h)
        if self.chi(h) != RootOfUnity(2, 1):
            raise ParameterError("chi(h) must be -1")
        one = RootOfUnity(1, 0)
        self.T = FiniteSubgroup(G, [x for x in H.elements if self.chi(x) == one])
        self.Tbar = subgroup_generate(self.Gbar, [self.bar(x) for x in H.elements])
        assert self.T.order * 2 == H.order == self.Tbar.order * 2
        self._lift_T = {self.bar(t): t for t in self.T.elements}

    def bar(self, g: Elem) -> Elem:
        return self.quotient.project(g)

    def lifts(self, gb: Elem) -> tuple:
        return self.quotient.lifts(gb)

    def lift_T(self, tb: Elem) -> Elem:
        return self._lift_T[tuple(tb)]

    def chi2(self, gb: Elem) -> RootOfUnity:
        return self.chi(self.quotient.section(gb)) ** 2

    def bar_bichar(self, beta: Bicharacter) -> Bicharacter:
        gens = [self.bar(g) for g in beta.generators]
        if subgroup_generate(self.Gbar, gens).elements != self.Tbar.elements:
            raise ParameterError("bicharacter must be given on a subgroup projecting onto H/<h>")
        return Bicharacter(self.Tbar, beta.N, beta.E, gens)

    def bar_structure(self, sg: StructuredKappaGamma) -> StructuredKappaGamma:
        return StructuredKappaGamma(sg.ell, sg.m, sg.k, sg.q, [self.bar(g) for g in sg.gamma_single],
                                    [(self.bar(a), self.bar(b)) for a, b in sg.gamma_pairs])


@lru_cache(maxsize=256)
def _context(G: GroupSpec, h: Elem, H: FiniteSubgroup) -> TypeIIContext:
    return TypeIIContext(G, h, H)


def make_type_II_context(G: GroupSpec, h: Elem, H: FiniteSubgroup) -> TypeIIContext:
    return TypeIIContext(G, h, H)


@dataclass(frozen=True)
class LieAdmissibleOption:
    common: Elem  # in G/<h>
    tau: tuple  # elements of T/<h>... i.e. of Tbar, one per single block
    lam: RootOfUnity | None


def admissible_options_II(ctx: TypeIIContext, beta_bar: Bicharacter, sgb: StructuredKappaGamma) -> list:
    """All choices of common value (hence tau) meeting the Type II admissibility conditions; sgb lives in G/<h>."""
    Gb, Tb = ctx.Gbar, ctx.Tbar
    vals = [Gb.op(g, g) for g in sgb.gamma_single] + [Gb.op(a, b) for a, b in sgb.gamma_pairs]
    if not vals:
        return []
    base = vals[0]
    if any(Gb.div(v, base) not in Tb for v in vals):
        return []
    Q = quadratic_form(beta_bar)
    out = []
    for t in Tb.elements:
        c = Gb.op(base, t)
        tau = tuple(Gb.div(c, Gb.op(g, g)) for g in sgb.gamma_single)
        lams = {RootOfUnity.from_sign(Q(tau[i])) * ctx.chi2(sgb.gamma_single[i]) for i in range(sgb.ell)}
        if len(lams) > 1:
            continue
        out.append(LieAdmissibleOption(c, tau, lams.pop() if lams else None))
    return out


def check_admissible(ctx: TypeIIContext, beta_bar: Bicharacter, sgb: StructuredKappaGamma):
    """Least admissible tau prefix over G/<h>, or None."""
    opts = admissible_options_II(ctx, beta_bar, sgb)
    if not opts:
        return None
    best = min(opts, key=lambda o: ctx.Gbar.key(o.common))
    return best.tau[:sgb.ell]


@dataclass
class PhiSolution:
    s_signs: tuple
    mus: tuple  # RootOfUnity per paired block
    lam: RootOfUnity


def solve_phi_type_II(variant: str, ctx: TypeIIContext, beta_bar: Bicharacter, sgb: StructuredKappaGamma,
                      tau_bar: Sequence[Elem], delta: Sequence[int] | None = None,
                      mu: RootOfUnity | None = None) -> PhiSolution:
    """Solve the S-signs and pair scalars so that phi^2 acts as chi^2."""
    Q = quadratic_form(beta_bar)
    chi2 = ctx.chi2
    b = [RootOfUnity.from_sign(Q(t)) for t in tau_bar]
    single = [b[i] * chi2(sgb.gamma_single[i]) for i in range(sgb.m)]
    if variant == "A_II1":
        if sgb.ell == 0:
            raise ParameterError("type II1 needs ell > 0")
        lam = single[0]
        for i in range(sgb.ell):
            if single[i] != lam:
                raise ParameterError(f"beta(t_{i + 1}) chi^2(g_{i + 1}) = {single[i]} differs from {lam}")
        s_signs = []
        for i in range(sgb.ell, sgb.m):
            s = (lam / single[i]).sign()
            if s == 0:
                raise ParameterError(f"block {i + 1}: {lam / single[i]} is not a sign")
            s_signs.append(s)
    elif variant == "A_II2":
        if sgb.ell != 0 or sgb.m == 0:
            raise ParameterError("type II2 needs ell = 0 < m")
        if delta is None or len(delta) != sgb.m or any(d not in (1, -1) for d in delta):
            raise ParameterError("type II2 needs a sign vector of length m")
        prods = [single[i] * RootOfUnity.from_sign(delta[i]) for i in range(sgb.m)]
        lam = prods[0]
        for i, v in enumerate(prods):
            if v != lam:
                raise ParameterError(f"beta(t_{i + 1}) chi^2(g_{i + 1}) delta_{i + 1} = {v} differs from {lam}")
        s_signs = list(delta)
    elif variant == "A_II3":
        if sgb.m != 0:
            raise ParameterError("type II3 needs m = 0")
        if mu is None:
            raise ParameterError("type II3 needs mu")
        lam = mu
        s_signs = []
    else:
        raise ParameterError(f"not a type II variant: {variant}")
    mus = []
    for j, (a, bb) in enumerate(sgb.gamma_pairs):
        mu_j = chi2(a) / lam
        if mu_j * chi2(bb) != lam:
            raise ParameterError(f"pair {sgb.m + j + 1}: mu^-1 chi^2(g') = mu chi^2(g'') has no solution with value {lam}")
        mus.append(mu_j)
    return PhiSolution(tuple(s_signs), tuple(mus), lam)


# ---------------------------------------------------------------------------


def phi_squared_matches(A: GradedAlgebraWithAntiAut, ctx: TypeIIContext) -> bool:
    R = A.R
    twice = A.apply(A.apply(R.mats))
    for i, gb in enumerate(R.degrees):
        if not twice[i] == R.mats[i].scale(ctx.chi2(gb)):
            return False
    return True


def refine_to_G_grading(A: GradedAlgebraWithAntiAut, ctx: TypeIIContext) -> GradedAlgebra:
    """Split each component of a G/<h>-grading into the eigenspaces of -phi."""
    R = A.R
    if not phi_squared_matches(A, ctx):
        raise ParameterError("phi^2 does not act as chi^2; no refinement exists")
    n = R.n
    out, degrees = [], []
    for gb, idx in R.components().items():
        B = KArray(R.N, R.mats.num[idx], R.mats.den)
        P = A.apply(B)
        total = 0
        for g in ctx.lifts(gb):
            V = B.scale(ctx.chi(g)) - P
            flat = V.reshape(len(idx), n * n)
            keep = km.independent_rows(flat)
            total += len(keep)
            if keep:
                out.append(KArray(V.N, V.num[keep], V.den))
                degrees += [g] * len(keep)
        if total != len(idx):
            raise ParameterError(f"eigenspaces of -phi do not fill the component {gb}")
    return GradedAlgebra(n, ctx.G, km.concat(out), degrees, "lie", None, {})


def trace_zero_part(A: GradedAlgebra) -> GradedAlgebra:
    """Intersect every component with the trace-zero matrices."""
    out, degrees = [], []
    for g, idx in A.components().items():
        B = KArray(A.N, A.mats.num[idx], A.mats.den)
        tr = B.trace()
        nz = np.nonzero(tr.nonzero_mask())[0]
        if len(nz) == 0:
            out.append(B)
            degrees += [g] * len(idx)
            continue
        j = int(nz[0])
        tj = tr.entry(j)
        rest = [i for i in range(len(idx)) if i != j]
        for i in rest:
            c = tr.entry(i) / tj
            out.append((B[i] - B[j].scale(c)).reshape(1, A.n, A.n))
            degrees.append(g)
    mats = km.concat(out) if out else KArray.zeros(A.N, (0, A.n, A.n))
    return GradedAlgebra(A.n, A.G, mats, degrees, "lie", None, dict(A.meta))


def skew_part(A: GradedAlgebraWithAntiAut) -> GradedAlgebra:
    """Components R_g intersected with {X : phi(X) = -X}."""
    R = A.R
    n = R.n
    out, degrees = [], []
    for g, idx in R.components().items():
        B = KArray(R.N, R.mats.num[idx], R.mats.den)
        V = B - A.apply(B)
        keep = km.independent_rows(V.reshape(len(idx), n * n))
        if keep:
            out.append(KArray(V.N, V.num[keep], V.den))
            degrees += [g] * len(keep)
    mats = km.concat(out) if out else KArray.zeros(R.N, (0, n, n))
    return GradedAlgebra(n, R.G, mats, degrees, "lie", None, {})


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class LieGradingParams:
    variant: str
    G: GroupSpec
    T: FiniteSubgroup | None = None  # A_I, C, D (and B, trivial)
    beta: Bicharacter | None = None  # on T; for type II on H cap ker chi (or any lift of H/<h>)
    kappa: tuple = ()  # A_I only
    gamma: tuple = ()  # A_I only
    structure: StructuredKappaGamma | None = None  # type II and B/C/D
    tau: tuple = ()
    delta: object = None  # sign for C/D/B, sign vector for A_II2
    mu: RootOfUnity | None = None  # A_II3
    H: FiniteSubgroup | None = None
    h: Elem | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown variant {self.variant!r}")

    @property
    def is_type_II(self) -> bool:
        return self.variant.startswith("A_II")

    def context(self) -> TypeIIContext:
        return _context(self.G, tuple(self.h), self.H)

    @property
    def n(self) -> int:
        if self.variant == "A_I":
            return sum(self.kappa) * int(round(self.T.order ** 0.5))
        if self.is_type_II:
            return sum(self.structure.kappa()) * int(round((self.H.order // 2) ** 0.5))
        return sum(self.structure.kappa()) * int(round(self.T.order ** 0.5))


def expected_lie_dimension(variant: str, n: int) -> int:
    if variant.startswith("A"):
        return n * n - 1
    if variant == "C":
        return n * (n + 1) // 2
    return n * (n - 1) // 2


def classification_flags(variant: str, n: int) -> list:
    """Sizes where the algebra is outside the range covered by the isomorphism theorems."""
    if variant.startswith("A"):
        return [] if n >= 2 else [INCOMPLETE]
    if variant == "B":
        return [] if n >= 5 else [INCOMPLETE]
    if variant == "C":
        return [] if n >= 6 else [INCOMPLETE]
    if n == 8:
        return [INCOMPLETE, "so8"]
    return [] if n >= 10 else [INCOMPLETE]


def _type_II_data(p: LieGradingParams):
    ctx = p.context()
    beta_bar = ctx.bar_bichar(p.beta)
    sgb = ctx.bar_structure(p.structure)
    tau_bar = tuple(ctx.bar(t) for t in p.tau)
    return ctx, beta_bar, sgb, tau_bar


def build_type_II_pair(p: LieGradingParams):
    """The G/<h>-graded algebra with the anti-automorphism for a type II parameter set."""
    ctx, beta_bar, sgb, tau_bar = _type_II_data(p)
    if len(tau_bar) != sgb.m or any(t not in ctx.Tbar for t in tau_bar):
        raise ParameterError("tau must list m elements of H")
    if common_value(ctx.Gbar, sgb, tau_bar) is None:
        raise ParameterError("gamma and tau do not satisfy g_i^2 t_i = g'_j g''_j in G/<h>; normalize first")
    if sgb.ell > 0 and not admissible_options_II(ctx, beta_bar, sgb):
        raise ParameterError("gamma is not admissible")
    delta = tuple(p.delta) if p.variant == "A_II2" else None
    if p.variant == "A_II3":
        vals = {ctx.chi2(a) * ctx.chi2(b) for a, b in sgb.gamma_pairs}
        if len(vals) != 1:
            raise ParameterError("chi^2(g' g'') is not constant over the pairs")
        if p.mu is None or p.mu ** 2 != vals.pop():
            raise ParameterError("mu^2 must equal the common value of chi^2(g' g'')")
    sol = solve_phi_type_II(p.variant, ctx, beta_bar, sgb, tau_bar, delta, p.mu)
    D = standard_division_realization(ctx.Tbar, beta_bar)
    R = construct_matrix_grading(sgb.matrix_params(ctx.Gbar, ctx.Tbar, beta_bar), D)
    Phi = _assemble_phi(D, sgb, tau_bar, sol.s_signs, [m.to_cyclo() for m in sol.mus])
    A = GradedAlgebraWithAntiAut(R, Phi, km.inverse(Phi), "anti-automorphism", {"solution": sol})
    return ctx, A


def construct_lie(p: LieGradingParams) -> GradedAlgebra:
    v = p.variant
    n = p.n
    if v == "A_I":
        if n < 2:
            raise ParameterError("sl_n needs n >= 2")
        R = construct_matrix_grading(MatrixGradingParams(p.G, p.T, p.beta, p.kappa, p.gamma))
        L = trace_zero_part(R)
    elif p.is_type_II:
        if n == 2:
            raise ParameterError("sl_2 has no type II gradings")
        if n < 2:
            raise ParameterError("sl_n needs n >= 2")
        ctx, A = build_type_II_pair(p)
        L = trace_zero_part(refine_to_G_grading(A, ctx))
    else:
        T = p.T if p.T is not None else FiniteSubgroup(p.G, [p.G.identity])
        beta = p.beta if p.beta is not None else trivial_bichar(T)
        delta = int(p.delta)
        if v == "B" and (delta != 1 or n % 2 == 0 or T.order != 1):
            raise ParameterError("type B needs delta = 1, n odd and T trivial")
        if v == "C" and delta != -1:
            raise ParameterError("type C needs delta = -1")
        if v == "D" and (delta != 1 or n % 2):
            raise ParameterError("type D needs delta = 1 and n even")
        A = build_involution(p.G, T, beta, p.structure, p.tau, delta)
        L = skew_part(A)
        L.meta["phi"] = A
    L.kind = "lie"
    L.meta.update({"variant": v, "params": p, "n": n, "flags": classification_flags(v, n)})
    return L


# ---------------------------------------------------------------------------


def verify_lie_grading(L: GradedAlgebra, max_report: int = 50) -> VerificationReport:
    n, m = L.n, L.dim
    viol = []
    stats = {"n": n, "basis_size": m}
    if m == 0:
        return VerificationReport(True, [], stats)
    V = L.mats.reshape(m, n * n)
    if len(km.independent_rows(V)) != m:
        return VerificationReport(False, [{"reason": "basis matrices are linearly dependent"}], stats)
    P = km.matmul(L.mats.reshape(m, 1, n, n), L.mats.reshape(1, m, n, n))
    Pt = KArray(P.N, np.swapaxes(P.num, 0, 1), P.den, normalize=False)
    br = (P - Pt).reshape(m * m, n * n)
    try:
        coords, resid = _coords_any(V, br, n)
    except km.SingularMatrix:
        # the trace form can degenerate on a non-simple span; fall back to the Hermitian pairing
        return VerificationReport(False, [{"reason": "no nondegenerate pairing on the span"}], stats)
    resid = resid.reshape(m, m)
    bad = degree_violations(L.G, L.degrees, coords.nonzero_mask().reshape(m, m, m), resid)
    for a, b in zip(*np.nonzero(np.triu(bad))):
        a, b = int(a), int(b)
        if not resid[a, b]:
            viol.append({"pair": [a, b], "reason": "bracket leaves the algebra"})
        else:
            viol.append({"pair": [a, b], "degrees": [_elem_json(L.degrees[a]), _elem_json(L.degrees[b])],
                         "reason": "bracket leaves the component of degree gh"})
    v = L.meta.get("variant")
    if v is not None:
        want = expected_lie_dimension(v, n)
        stats["expected_dimension"] = want
        if m != want:
            viol.append({"reason": f"dimension {m} differs from {want}"})
    stats["violations"] = len(viol)
    return VerificationReport(not viol, viol[:max_report], stats)
