"""Isomorphism deciders, canonical keys and an exhaustive brute-force oracle.

Every decider returns a :class:`Witness` (truthy) or None.  Keys minimize a
sorted block serialization over all shifts of a finite group, so equal keys
mean isomorphic gradings within one family.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .abgroup import Elem, FiniteSubgroup, GroupSpec, canonical_coset_rep, coset_eq, coset_reps, subgroup_generate
from .bichar import Bicharacter, bichar_eq
from .cyclotomic import RootOfUnity
from .graded_matrix import MatrixGradingParams, ParameterError
from .involution import InvolutionParams, StructuredKappaGamma
from .lie_grading import INCOMPLETE, LieGradingParams, TypeIIContext, classification_flags

KEY_PREFIX = "gk1:"


class RefusedError(Exception):
    """The question lies outside the range where the classification applies."""


@dataclass
class Witness:
    shift: Elem
    perm: list
    swaps: list = field(default_factory=list)
    branch: str = "direct"

    def to_json(self) -> dict:
        out = {"shift": list(self.shift), "perm": list(self.perm), "branch": self.branch}
        if self.swaps:
            out["swaps"] = list(self.swaps)
        return out


# ---------------------------------------------------------------------------
# elementary gradings: shift and permutation


def equiv_shift_perm(G: GroupSpec, T: FiniteSubgroup, kappa1, gamma1, kappa2, gamma2) -> Witness | None:
    """Find g, pi with k2_i = k1_pi(i) and g2_i = g1_pi(i) g mod T."""
    s = len(kappa1)
    if s != len(kappa2) or sorted(kappa1) != sorted(kappa2):
        return None
    reps1 = {canonical_coset_rep(G, g, T): j for j, g in enumerate(gamma1)}
    for j in range(s):
        g = G.div(gamma2[0], gamma1[j])
        perm = []
        for i in range(s):
            jj = reps1.get(canonical_coset_rep(G, G.div(gamma2[i], g), T))
            if jj is None or kappa1[jj] != kappa2[i]:
                break
            perm.append(jj)
        else:
            if len(set(perm)) == s:
                return Witness(g, perm)
    return None


def iso_matrix_gradings(p1: MatrixGradingParams, p2: MatrixGradingParams) -> Witness | None:
    if p1.G != p2.G:
        raise ParameterError("gradings by different groups")
    if p1.n != p2.n:
        raise ParameterError(f"matrix sizes differ: {p1.n} vs {p2.n}")
    if p1.T != p2.T or not bichar_eq(p1.beta, p2.beta):
        return None
    return equiv_shift_perm(p1.G, p1.T, p1.kappa, p1.gamma, p2.kappa, p2.gamma)


# ---------------------------------------------------------------------------
# structured data: singles, doubled singles, swapped pairs


def _classes(sg: StructuredKappaGamma) -> list:
    return [range(0, sg.ell), range(sg.ell, sg.m)]


def match_structured(G: GroupSpec, T: FiniteSubgroup, sg1: StructuredKappaGamma, sg2: StructuredKappaGamma,
                     tags1: Sequence, tags2: Sequence, exact_products: bool,
                     extra: Callable[[Elem], bool] | None = None) -> Witness | None:
    """Shift/permutation/pair-swap search taking sg1 to sg2.

    tags are compared exactly on single blocks (tau entries, signs).  With
    exact_products the pair products must satisfy g2' g2'' = g1' g1'' g^2.
    """
    if (sg1.ell, sg1.m, sg1.k) != (sg2.ell, sg2.m, sg2.k):
        return None
    rep = lambda x: canonical_coset_rep(G, x, T)  # noqa: E731
    if sg1.m > 0:
        cls = range(0, sg1.ell) if sg1.ell > 0 else range(sg1.ell, sg1.m)
        cands = [G.div(sg2.gamma_single[0], sg1.gamma_single[j]) for j in cls]
    elif sg1.k > 0:
        a2 = sg2.gamma_pairs[0][0]
        cands = [G.div(a2, x) for pair in sg1.gamma_pairs for x in pair]
    else:
        cands = [G.identity]
    single1 = {}
    for j, g in enumerate(sg1.gamma_single):
        single1[rep(g)] = j
    pair1 = {}
    for j, (a, b) in enumerate(sg1.gamma_pairs):
        pair1[frozenset((rep(a), rep(b)))] = j
    seen = set()
    for g in cands:
        rg = rep(g)
        if rg in seen:
            continue
        seen.add(rg)
        perm, swaps = [], []
        ok = True
        for i, g2 in enumerate(sg2.gamma_single):
            j = single1.get(rep(G.div(g2, g)))
            same_class = j is not None and ((j < sg1.ell) == (i < sg1.ell))
            if not same_class or sg1.q[j] != sg2.q[i] or tags1[j] != tags2[i]:
                ok = False
                break
            perm.append(j)
        if not ok:
            continue
        for i, (a2, b2) in enumerate(sg2.gamma_pairs):
            ra, rb = rep(G.div(a2, g)), rep(G.div(b2, g))
            j = pair1.get(frozenset((ra, rb)))
            if j is None or sg1.q[sg1.m + j] != sg2.q[sg1.m + i]:
                ok = False
                break
            a1, _ = sg1.gamma_pairs[j]
            swaps.append(int(rep(a1) != ra))
            perm.append(sg1.m + j)
        if not ok or len(set(perm)) != sg1.k:
            continue
        if exact_products:
            g2sq = G.op(g, g)
            for i, (a2, b2) in enumerate(sg2.gamma_pairs):
                a1, b1 = sg1.gamma_pairs[perm[sg1.m + i] - sg1.m]
                if G.op(a2, b2) != G.mul(a1, b1, g2sq):
                    ok = False
                    break
        if ok and extra is not None and not extra(g):
            ok = False
        if ok:
            return Witness(g, perm, swaps)
    return None


def equiv_star(G: GroupSpec, T: FiniteSubgroup, sg1, tau1, sg2, tau2) -> Witness | None:
    return match_structured(G, T, sg1, sg2, list(tau1), list(tau2), exact_products=sg1.m == 0)


def equiv_star_m0(G: GroupSpec, T: FiniteSubgroup, sg1, sg2) -> Witness | None:
    return match_structured(G, T, sg1, sg2, [], [], exact_products=True)


def iso_graded_involution(q1: InvolutionParams, q2: InvolutionParams) -> Witness | None:
    if q1.G != q2.G:
        raise ParameterError("gradings by different groups")
    if q1.T != q2.T or not bichar_eq(q1.beta, q2.beta) or q1.delta != q2.delta:
        return None
    return equiv_star(q1.G, q1.T, q1.structure, q1.tau, q2.structure, q2.tau)


def invert_structure(G: GroupSpec, sg: StructuredKappaGamma) -> StructuredKappaGamma:
    return StructuredKappaGamma(sg.ell, sg.m, sg.k, sg.q, [G.inv(g) for g in sg.gamma_single],
                                [(G.inv(a), G.inv(b)) for a, b in sg.gamma_pairs])


# ---------------------------------------------------------------------------
# Lie gradings


def _refuse_if_unclassified(p: LieGradingParams):
    flags = classification_flags(p.variant, p.n)
    if "so8" in flags:
        raise RefusedError("so_8 lies outside the classified range (triality gives extra isomorphisms)")
    if INCOMPLETE in flags:
        raise RefusedError(f"{p.variant} with n = {p.n} lies outside the classified range")


@dataclass
class _IIData:
    ctx: TypeIIContext
    beta: Bicharacter
    sg: StructuredKappaGamma
    tau: tuple
    delta: tuple | None
    mu: RootOfUnity | None


def _type_II(p: LieGradingParams) -> _IIData:
    ctx = p.context()
    delta = tuple(p.delta) if p.variant == "A_II2" else None
    return _IIData(ctx, ctx.bar_bichar(p.beta), ctx.bar_structure(p.structure), tuple(ctx.bar(t) for t in p.tau),
                   delta, p.mu)


def _II_tags(d: _IIData) -> list:
    if d.delta is not None:
        return list(zip(d.tau, d.delta))
    return list(d.tau)


def iso_lie(p1: LieGradingParams, p2: LieGradingParams) -> Witness | None:
    if p1.G != p2.G:
        raise ParameterError("gradings by different groups")
    _refuse_if_unclassified(p1)
    _refuse_if_unclassified(p2)
    if p1.variant != p2.variant or p1.n != p2.n:
        return None
    G, v = p1.G, p1.variant
    if v == "A_I":
        if p1.T != p2.T:
            return None
        if bichar_eq(p1.beta, p2.beta):
            w = equiv_shift_perm(G, p1.T, p1.kappa, p1.gamma, p2.kappa, p2.gamma)
            if w:
                return w
        if bichar_eq(p1.beta, p2.beta.inverse()):
            w = equiv_shift_perm(G, p1.T, p1.kappa, p1.gamma, p2.kappa, tuple(G.inv(g) for g in p2.gamma))
            if w:
                w.branch = "inverse"
                return w
        return None
    if p1.is_type_II:
        if p1.H != p2.H or p1.h != p2.h:
            return None
        d1, d2 = _type_II(p1), _type_II(p2)
        if not bichar_eq(d1.beta, d2.beta):
            return None
        Gb, Tb = d1.ctx.Gbar, d1.ctx.Tbar
        for branch in ("direct", "inverse"):
            sg2 = d2.sg if branch == "direct" else invert_structure(Gb, d2.sg)
            mu2 = d2.mu
            if branch == "inverse" and mu2 is not None:
                mu2 = mu2.inverse()
            extra = None
            if v == "A_II3":
                extra = (lambda g, mu2=mu2: mu2 == d1.mu * d1.ctx.chi2(g))
            w = match_structured(Gb, Tb, d1.sg, sg2, _II_tags(d1), _II_tags(d2), exact_products=d1.sg.m == 0,
                                 extra=extra)
            if w:
                w.branch = branch
                return w
        return None
    # B, C, D
    T1 = p1.T if p1.T is not None else FiniteSubgroup(G, [G.identity])
    T2 = p2.T if p2.T is not None else FiniteSubgroup(G, [G.identity])
    if T1 != T2 or int(p1.delta) != int(p2.delta):
        return None
    if p1.beta is not None and p2.beta is not None and not bichar_eq(p1.beta, p2.beta):
        return None
    return equiv_star(G, T1, p1.structure, p1.tau, p2.structure, p2.tau)


def iso_any(p1, p2) -> Witness | None:
    if type(p1) is not type(p2):
        return None
    if isinstance(p1, MatrixGradingParams):
        return iso_matrix_gradings(p1, p2)
    if isinstance(p1, InvolutionParams):
        return iso_graded_involution(p1, p2)
    return iso_lie(p1, p2)


# ---------------------------------------------------------------------------
# canonical keys


def _fr(r: RootOfUnity) -> tuple:
    a = r.angle
    return (a.numerator, a.denominator)


def bichar_signature(beta: Bicharacter) -> tuple:
    """Values of beta on a generating set chosen greedily from the sorted elements of T."""
    T = beta.T
    G = T.parent
    gens = []
    span = FiniteSubgroup(G, [G.identity])
    for t in sorted(T.elements, key=G.key):
        if t not in span:
            gens.append(t)
            span = subgroup_generate(G, gens)
        if span.order == T.order:
            break
    vals = tuple(_fr(beta(a, b)) for a in gens for b in gens)
    return (tuple(gens), vals)


def _elem(g) -> tuple:
    return tuple(int(x) for x in g)


def _matrix_record(G, T, beta_sig, kappa, gamma, g, variant="matrix"):
    blocks = sorted((k, _elem(canonical_coset_rep(G, G.op(x, g), T))) for k, x in zip(kappa, gamma))
    return (variant, beta_sig, tuple(blocks))


def _structured_record(G, T, sg, tags, g, head, exact_c=None, extra=None):
    rep = lambda x: _elem(canonical_coset_rep(G, G.op(x, g), T))  # noqa: E731
    c1 = sorted((sg.q[i], rep(sg.gamma_single[i]), tags[i]) for i in range(sg.ell))
    c2 = sorted((sg.q[i], rep(sg.gamma_single[i]), tags[i]) for i in range(sg.ell, sg.m))
    pairs = sorted((sg.q[sg.m + j],) + tuple(sorted((rep(a), rep(b)))) for j, (a, b) in enumerate(sg.gamma_pairs))
    tail = []
    if exact_c is not None:
        tail.append(_elem(G.mul(exact_c, g, g)))
    if extra is not None:
        tail.append(extra(g))
    return (head, (sg.ell, sg.m, sg.k), tuple(c1), tuple(c2), tuple(pairs), tuple(tail))


def _require_finite(G: GroupSpec):
    if not G.is_finite:
        raise RefusedError("canonical keys need a finite group; use the pairwise deciders instead")


def _tag(x):
    if isinstance(x, tuple) and x and isinstance(x[0], tuple):
        return tuple(_elem(y) if isinstance(y, tuple) else y for y in x)
    return _elem(x) if isinstance(x, tuple) else x


def _minimal_record(p):
    if isinstance(p, MatrixGradingParams):
        G, T = p.G, p.T
        _require_finite(G)
        sig = bichar_signature(p.beta)
        rec = min(_matrix_record(G, T, sig, p.kappa, p.gamma, g) for g in coset_reps(G, T))
        return (("matrix", _elem_group(G), _elem_set(T)), rec)
    if isinstance(p, InvolutionParams):
        G, T = p.G, p.T
        _require_finite(G)
        sg = p.structure
        c = G.op(*sg.gamma_pairs[0]) if sg.m == 0 and sg.k > 0 else None
        tags = [_elem(t) for t in p.tau]
        rec = min(_structured_record(G, T, sg, tags, g, p.delta, c) for g in coset_reps(G, T))
        return (("matrix-with-involution", _elem_group(G), _elem_set(T), bichar_signature(p.beta)), rec)
    if isinstance(p, LieGradingParams):
        _require_finite(p.G)
        _refuse_if_unclassified(p)
        G, v = p.G, p.variant
        if v == "A_I":
            T = p.T
            best = None
            for beta, gamma in ((p.beta, p.gamma), (p.beta.inverse(), tuple(G.inv(x) for x in p.gamma))):
                sig = bichar_signature(beta)
                for g in coset_reps(G, T):
                    r = _matrix_record(G, T, sig, p.kappa, gamma, g, "A_I")
                    if best is None or r < best:
                        best = r
            return (("A_I", _elem_group(G), _elem_set(T)), best)
        if p.is_type_II:
            d = _type_II(p)
            Gb, Tb = d.ctx.Gbar, d.ctx.Tbar
            best = None
            for branch in ("direct", "inverse"):
                sg = d.sg if branch == "direct" else invert_structure(Gb, d.sg)
                mu = d.mu if branch == "direct" or d.mu is None else d.mu.inverse()
                c = Gb.op(*sg.gamma_pairs[0]) if sg.m == 0 and sg.k > 0 else None
                tags = [_tag(t) for t in _II_tags(d)]
                extra = None
                if v == "A_II3":
                    extra = (lambda g, mu=mu: _fr(mu * d.ctx.chi2(g)))
                for g in coset_reps(Gb, Tb):
                    r = _structured_record(Gb, Tb, sg, tags, g, v, c, extra)
                    if best is None or r < best:
                        best = r
            head = (v, _elem_group(G), _elem_set(p.H), _elem(p.h), bichar_signature(d.beta))
            return (head, best)
        T = p.T if p.T is not None else FiniteSubgroup(G, [G.identity])
        sg = p.structure
        c = G.op(*sg.gamma_pairs[0]) if sg.m == 0 and sg.k > 0 else None
        tags = [_elem(t) for t in p.tau]
        beta_sig = bichar_signature(p.beta) if p.beta is not None else ((), ())
        rec = min(_structured_record(G, T, sg, tags, g, int(p.delta), c) for g in coset_reps(G, T))
        return ((v, _elem_group(G), _elem_set(T), beta_sig), rec)
    raise ParameterError(f"no canonical key for {type(p).__name__}")


def _elem_group(G: GroupSpec) -> tuple:
    return (G.free_rank, tuple(G.torsion))


def _elem_set(T: FiniteSubgroup) -> tuple:
    return tuple(sorted(_elem(t) for t in T.elements))


def _to_jsonable(x):
    if isinstance(x, tuple) or isinstance(x, list):
        return [_to_jsonable(y) for y in x]
    return x


def canonical_serialization(p) -> str:
    return json.dumps(_to_jsonable(_minimal_record(p)), separators=(",", ":"))


def canonical_key(p) -> str:
    return KEY_PREFIX + canonical_serialization(p).encode().hex()


def decode_key(key: str):
    if not key.startswith(KEY_PREFIX):
        raise ParameterError("not a canonical key")
    return json.loads(bytes.fromhex(key[len(KEY_PREFIX):]).decode())


def canonical_form(p: MatrixGradingParams) -> MatrixGradingParams:
    """Representative of the isomorphism class: sorted blocks, least coset representatives, canonical beta."""
    G, T = p.G, p.T
    _require_finite(G)
    sig = bichar_signature(p.beta)
    best = min((_matrix_record(G, T, sig, p.kappa, p.gamma, g), g) for g in coset_reps(G, T))
    blocks = best[0][2]
    return MatrixGradingParams(G, T, p.beta.canonical(), tuple(k for k, _ in blocks), tuple(r for _, r in blocks))


def same_params(p1: MatrixGradingParams, p2: MatrixGradingParams) -> bool:
    return p1 == p2


# ---------------------------------------------------------------------------
# brute-force oracle: every group element, every permutation, every pair swap


def _perms_within(classes: list):
    """Permutations of the concatenated index classes that preserve each class."""
    per_class = [list(itertools.permutations(c)) for c in classes]
    for combo in itertools.product(*per_class):
        out = []
        for part in combo:
            out.extend(part)
        yield out


def brute_force_matrix(p1: MatrixGradingParams, p2: MatrixGradingParams) -> bool:
    G = p1.G
    if p1.T != p2.T or not bichar_eq(p1.beta, p2.beta) or len(p1.kappa) != len(p2.kappa):
        return False
    s = len(p1.kappa)
    for g in G.elements():
        for pi in itertools.permutations(range(s)):
            if all(p2.kappa[i] == p1.kappa[pi[i]] and coset_eq(G, p2.gamma[i], G.op(p1.gamma[pi[i]], g), p1.T)
                   for i in range(s)):
                return True
    return False


def brute_force_structured(G, T, sg1, tags1, sg2, tags2, exact_products, extra=None) -> bool:
    if (sg1.ell, sg1.m, sg1.k) != (sg2.ell, sg2.m, sg2.k):
        return False
    classes = [list(range(0, sg1.ell)), list(range(sg1.ell, sg1.m)), list(range(sg1.m, sg1.k))]
    npairs = sg1.k - sg1.m
    for g in G.elements():
        if extra is not None and not extra(g):
            continue
        for pi in _perms_within(classes):
            if any(sg2.q[i] != sg1.q[pi[i]] for i in range(sg1.k)):
                continue
            if any(tags2[i] != tags1[pi[i]] for i in range(sg1.m)):
                continue
            if not all(coset_eq(G, sg2.gamma_single[i], G.op(sg1.gamma_single[pi[i]], g), T) for i in range(sg1.m)):
                continue
            for sw in itertools.product((0, 1), repeat=npairs):
                good = True
                for i in range(npairs):
                    a1, b1 = sg1.gamma_pairs[pi[sg1.m + i] - sg1.m]
                    if sw[i]:
                        a1, b1 = b1, a1
                    a2, b2 = sg2.gamma_pairs[i]
                    if not (coset_eq(G, a2, G.op(a1, g), T) and coset_eq(G, b2, G.op(b1, g), T)):
                        good = False
                        break
                    if exact_products and G.op(a2, b2) != G.mul(a1, b1, g, g):
                        good = False
                        break
                if good:
                    return True
    return False


def brute_force_iso(p1, p2) -> bool:
    """Independent exhaustive search over the full symmetry set (finite groups only)."""
    if type(p1) is not type(p2):
        return False
    if isinstance(p1, MatrixGradingParams):
        return brute_force_matrix(p1, p2)
    if isinstance(p1, InvolutionParams):
        if p1.T != p2.T or not bichar_eq(p1.beta, p2.beta) or p1.delta != p2.delta:
            return False
        return brute_force_structured(p1.G, p1.T, p1.structure, list(p1.tau), p2.structure, list(p2.tau),
                                      p1.structure.m == 0)
    if p1.variant != p2.variant or p1.n != p2.n:
        return False
    G, v = p1.G, p1.variant
    if v == "A_I":
        if p1.T != p2.T:
            return False
        a = MatrixGradingParams(G, p1.T, p1.beta, p1.kappa, p1.gamma)
        if brute_force_matrix(a, MatrixGradingParams(G, p2.T, p2.beta, p2.kappa, p2.gamma)):
            return True
        inv = MatrixGradingParams(G, p2.T, p2.beta.inverse(), p2.kappa, tuple(G.inv(x) for x in p2.gamma))
        return brute_force_matrix(a, inv)
    if p1.is_type_II:
        if p1.H != p2.H or p1.h != p2.h:
            return False
        d1, d2 = _type_II(p1), _type_II(p2)
        if not bichar_eq(d1.beta, d2.beta):
            return False
        Gb, Tb = d1.ctx.Gbar, d1.ctx.Tbar
        for branch in ("direct", "inverse"):
            sg2 = d2.sg if branch == "direct" else invert_structure(Gb, d2.sg)
            mu2 = d2.mu if branch == "direct" or d2.mu is None else d2.mu.inverse()
            extra = None
            if v == "A_II3":
                extra = (lambda g, mu2=mu2: mu2 == d1.mu * d1.ctx.chi2(g))
            if brute_force_structured(Gb, Tb, d1.sg, _II_tags(d1), sg2, _II_tags(d2), d1.sg.m == 0, extra):
                return True
        return False
    T1 = p1.T if p1.T is not None else FiniteSubgroup(G, [G.identity])
    T2 = p2.T if p2.T is not None else FiniteSubgroup(G, [G.identity])
    if T1 != T2 or int(p1.delta) != int(p2.delta):
        return False
    if p1.beta is not None and p2.beta is not None and not bichar_eq(p1.beta, p2.beta):
        return False
    return brute_force_structured(G, T1, p1.structure, list(p1.tau), p2.structure, list(p2.tau),
                                  p1.structure.m == 0)
