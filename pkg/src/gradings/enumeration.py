"""Exhaustive tables of grading classes for small finite groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, isqrt, lcm

from .abgroup import (FiniteSubgroup, GroupSpec, abelian_invariants, all_subgroups, coset_reps, group_table,
                      is_elementary_2, is_square_shape, rank_2, subgroup_basis)
from .bichar import Bicharacter, is_nondegenerate, quadratic_form
from .classify import RefusedError, canonical_form, canonical_key
from .cyclotomic import RootOfUnity
from .graded_matrix import MatrixGradingParams, ParameterError
from .involution import InvolutionParams, StructuredKappaGamma, admissible_options
from .lie_grading import (INCOMPLETE, LieGradingParams, _context, admissible_options_II, classification_flags,
                          solve_phi_type_II)

MAX_N = 12
MAX_GROUP = 64

ALGEBRAS = ("matrix", "matrix-involution", "sl", "so", "sp")


@dataclass
class TableEntry:
    key: str
    family: str
    params: object


@dataclass
class ClassificationTable:
    G: GroupSpec
    algebra: str
    n: int
    entries: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def keys(self) -> list:
        return [e.key for e in self.entries]

    def counts(self) -> dict:
        out: dict = {}
        for e in self.entries:
            out[e.family] = out.get(e.family, 0) + 1
        return dict(sorted(out.items()))

    def summary(self) -> str:
        lines = [f"group {self.G}  algebra {self.algebra}  n = {self.n}", f"classes: {len(self.entries)}"]
        for fam, c in self.counts().items():
            lines.append(f"  {fam}: {c}")
        return "\n".join(lines) + "\n"


class _Collector:
    """Deduplicates by canonical key; the final table is sorted by key."""

    def __init__(self):
        self.seen: dict = {}

    def add(self, family: str, p) -> bool:
        key = canonical_key(p)
        if key in self.seen:
            return False
        self.seen[key] = TableEntry(key, family, p)
        return True

    def table(self, G, algebra, n) -> ClassificationTable:
        return ClassificationTable(G, algebra, n, [self.seen[k] for k in sorted(self.seen)])


def check_bounds(G: GroupSpec, n: int, max_n: int = MAX_N, max_group: int = MAX_GROUP):
    if not G.is_finite:
        raise RefusedError("enumeration needs a finite group")
    if G.order > max_group:
        raise ParameterError(f"|G| = {G.order} exceeds the bound {max_group}")
    if not 1 <= n <= max_n:
        raise ParameterError(f"n = {n} is outside 1..{max_n}")


# ---------------------------------------------------------------------------
# division gradings


def factor_profile(T: FiniteSubgroup) -> tuple:
    """(l_1, ..., l_r) with T = Z_{l_1}^2 x ... x Z_{l_r}^2, for square-shaped T."""
    out = []
    for p, exps in abelian_invariants(T).items():
        out += [p ** e for e in exps[::2]]
    return tuple(sorted(out))


def enum_division_supports(G: GroupSpec, n: int) -> list:
    """(T, profile) for every square-shaped subgroup T with sqrt|T| dividing n."""
    out = []
    for T in all_subgroups(G):
        if not is_square_shape(T):
            continue
        ell = isqrt(T.order)
        if n % ell == 0:
            out.append((T, factor_profile(T)))
    return out


def enum_bicharacters(T: FiniteSubgroup) -> list:
    """All nondegenerate alternating bicharacters on T, scanning exponent matrices on a fixed basis."""
    if T.order > 256:
        raise ParameterError("|T| must be at most 256")
    basis = subgroup_basis(T)
    if not basis:
        return [Bicharacter(T, 1, [], [])]
    gens = [g for g, _ in basis]
    orders = [o for _, o in basis]
    N = lcm(*orders)
    m = len(gens)
    slots = [(i, j) for i in range(m) for j in range(i + 1, m)]
    ranges = [range(0, N, N // gcd(orders[i], orders[j])) for i, j in slots]
    out = []
    for vals in itertools.product(*ranges):
        E = [[0] * m for _ in range(m)]
        for (i, j), v in zip(slots, vals):
            E[i][j] = v
            E[j][i] = -v % N
        b = Bicharacter(T, N, E, gens)
        if is_nondegenerate(b):
            out.append(b)
    return out


# ---------------------------------------------------------------------------
# block data


def compositions(total: int, parts: int):
    """Ordered tuples of positive integers of the given length summing to total."""
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def block_choices(G: GroupSpec, T: FiniteSubgroup, K: int):
    """(kappa, gamma) over distinct cosets with the first block pinned to the identity coset."""
    reps = coset_reps(G, T)
    e, rest = reps[0], reps[1:]
    for s in range(1, min(K, len(reps)) + 1):
        for comb in itertools.combinations(rest, s - 1):
            gamma = (e,) + comb
            for kappa in compositions(K, s):
                yield kappa, gamma


def pairings(kappa: tuple):
    """Every way to group block indices into fixed singles and unordered pairs of equal size."""

    def rec(remaining):
        if not remaining:
            yield [], []
            return
        i, rest = remaining[0], remaining[1:]
        for singles, pairs in rec(rest):
            yield [i] + singles, pairs
        for pos, j in enumerate(rest):
            if kappa[j] == kappa[i]:
                for singles, pairs in rec(rest[:pos] + rest[pos + 1:]):
                    yield singles, [(i, j)] + pairs

    yield from rec(list(range(len(kappa))))


def structure_from(kappa, gamma, singles, pairs) -> StructuredKappaGamma:
    odd = [i for i in singles if kappa[i] % 2]
    even = [i for i in singles if kappa[i] % 2 == 0]
    q = [kappa[i] for i in odd] + [kappa[i] // 2 for i in even] + [kappa[i] for i, _ in pairs]
    return StructuredKappaGamma(len(odd), len(odd) + len(even), len(odd) + len(even) + len(pairs), q,
                                [gamma[i] for i in odd + even], [(gamma[i], gamma[j]) for i, j in pairs])


def _normalized_pairs(G: GroupSpec, sg: StructuredKappaGamma, c) -> StructuredKappaGamma:
    return sg.with_pairs([(a, G.op(b, G.div(c, G.op(a, b)))) for a, b in sg.gamma_pairs])


# ---------------------------------------------------------------------------
# tables


class _ShiftOrbits:
    """Integer invariant of (kappa, gamma) under translation, for fast pre-deduplication inside one (T, beta) cell."""

    def __init__(self, G: GroupSpec, T: FiniteSubgroup):
        els, self.idx, tab = group_table(G)
        t_idx = [self.idx[t] for t in T.elements]
        rep_of = tab[:, t_idx].min(axis=1)
        self.shifts = sorted({int(r) for r in rep_of})
        self.table = rep_of[tab]  # table[a, g] = coset id of a g

    def invariant(self, kappa, gamma) -> tuple:
        rows = self.table[[self.idx[g] for g in gamma]][:, self.shifts]
        return min(tuple(sorted(zip(kappa, col.tolist()))) for col in rows.T)


def matrix_classes(G: GroupSpec, n: int):
    """One MatrixGradingParams per class, before key computation."""
    for T, _ in enum_division_supports(G, n):
        K = n // isqrt(T.order)
        orbits = _ShiftOrbits(G, T)
        for beta in enum_bicharacters(T):
            seen = set()
            for kappa, gamma in block_choices(G, T, K):
                inv = orbits.invariant(kappa, gamma)
                if inv not in seen:
                    seen.add(inv)
                    yield MatrixGradingParams(G, T, beta, kappa, gamma)


def enum_matrix_gradings(G: GroupSpec, n: int, **bounds) -> ClassificationTable:
    check_bounds(G, n, **bounds)
    col = _Collector()
    for p in matrix_classes(G, n):
        col.add("matrix", canonical_form(p))
    return col.table(G, "matrix", n)


def involution_parameters(G: GroupSpec, n: int, delta: int | None = None):
    """Every normalized *-admissible parameter set (with repetitions) for M_n with involution."""
    for T, _ in enum_division_supports(G, n):
        if not is_elementary_2(T):
            continue
        K = n // isqrt(T.order)
        for beta in enum_bicharacters(T):
            for kappa, gamma in block_choices(G, T, K):
                for singles, pairs in pairings(kappa):
                    sg = structure_from(kappa, gamma, singles, pairs)
                    for opt in admissible_options(G, T, beta, sg):
                        sgn = _normalized_pairs(G, sg, opt.common)
                        deltas = (opt.delta,) if opt.delta is not None else (1, -1)
                        for d in deltas:
                            if delta is None or d == delta:
                                yield InvolutionParams(G, T, beta, sgn, opt.tau, d)


def enum_involution_gradings(G: GroupSpec, n: int, delta: int | None = None, **bounds) -> ClassificationTable:
    check_bounds(G, n, **bounds)
    col = _Collector()
    for p in involution_parameters(G, n, delta):
        col.add("matrix-with-involution", p)
    return col.table(G, "matrix-involution", n)


def _type_I(G, n, col):
    for p in matrix_classes(G, n):
        col.add("A_I", LieGradingParams("A_I", G, p.T, p.beta, p.kappa, p.gamma))


def _square_root_pair(r: RootOfUnity) -> tuple:
    return RootOfUnity(2 * r.N, r.k), RootOfUnity(2 * r.N, r.k + r.N)


def type_II_contexts(G: GroupSpec, n: int):
    """(h, H) with H elementary 2 of odd rank containing h and sqrt|H/<h>| dividing n."""
    for H in all_subgroups(G):
        if not is_elementary_2(H) or rank_2(H) % 2 != 1:
            continue
        ell = isqrt(H.order // 2)
        if n % ell:
            continue
        for h in H.elements:
            if h != G.identity:
                yield h, H


def type_II_parameters(G: GroupSpec, n: int):
    """Every normalized type II parameter set (with repetitions) for sl_n, in G coordinates."""
    for h, H in type_II_contexts(G, n):
        ctx = _context(G, tuple(h), H)
        Gb, Tb = ctx.Gbar, ctx.Tbar
        sec = ctx.quotient.section
        K = n // isqrt(Tb.order)
        for bb in enum_bicharacters(Tb):
            beta = Bicharacter(ctx.T, bb.N, bb.E, [ctx.lift_T(g) for g in bb.generators])
            for kappa, gamma in block_choices(Gb, Tb, K):
                for singles, pairs in pairings(kappa):
                    sg0 = structure_from(kappa, gamma, singles, pairs)
                    for opt in admissible_options_II(ctx, bb, sg0):
                        sgb = _normalized_pairs(Gb, sg0, opt.common)
                        sgG = StructuredKappaGamma(sgb.ell, sgb.m, sgb.k, sgb.q, [sec(g) for g in sgb.gamma_single],
                                                   [(sec(a), sec(b)) for a, b in sgb.gamma_pairs])
                        tau = tuple(ctx.lift_T(t) for t in opt.tau)
                        base = dict(G=G, T=ctx.T, beta=beta, structure=sgG, tau=tau, H=H, h=h)
                        if sgb.ell > 0:
                            yield LieGradingParams("A_II1", **base)
                        elif sgb.m > 0:
                            for d1 in (1, -1):
                                sol = _II2_signs(ctx, bb, sgb, opt.tau, d1)
                                if sol is not None:
                                    yield LieGradingParams("A_II2", delta=sol, **base)
                        else:
                            a, b = sgb.gamma_pairs[0]
                            for mu in _square_root_pair(ctx.chi2(a) * ctx.chi2(b)):
                                yield LieGradingParams("A_II3", mu=mu, **base)


def _II2_signs(ctx, bb, sgb, tau_bar, d1):
    Q = quadratic_form(bb)
    single = [RootOfUnity.from_sign(Q(t)) * ctx.chi2(g) for t, g in zip(tau_bar, sgb.gamma_single)]
    lam = single[0] * RootOfUnity.from_sign(d1)
    out = []
    for v in single:
        s = (lam / v).sign()
        if s == 0:
            return None
        out.append(s)
    try:
        solve_phi_type_II("A_II2", ctx, bb, sgb, tau_bar, out)
    except ParameterError:
        return None
    return tuple(out)


def enum_lie_gradings(G: GroupSpec, kind: str, n: int, **bounds) -> ClassificationTable:
    """Classes of G-gradings on sl_n (kind A), so_n with n odd (B), sp_n (C) or so_n with n even (D)."""
    check_bounds(G, n, **bounds)
    kind = kind.upper()
    if kind not in ("A", "B", "C", "D"):
        raise ParameterError(f"unknown type {kind!r}")
    if kind == "B" and n % 2 == 0 or kind == "D" and n % 2 or kind == "C" and n % 2:
        raise ParameterError(f"type {kind} does not exist for n = {n}")
    flags = classification_flags(kind, n)
    if "so8" in flags:
        raise RefusedError("so_8 is outside the classified range")
    if INCOMPLETE in flags:
        raise RefusedError(f"type {kind} with n = {n} is outside the classified range")
    col = _Collector()
    if kind == "A":
        _type_I(G, n, col)
        if n > 2:
            for p in type_II_parameters(G, n):
                col.add(p.variant, p)
    else:
        delta = -1 if kind == "C" else 1
        for q in involution_parameters(G, n, delta):
            if kind == "B" and q.T.order != 1:
                continue
            col.add(kind, LieGradingParams(kind, G, q.T, q.beta, structure=q.structure, tau=q.tau, delta=q.delta))
    return col.table(G, {"A": "sl", "B": "so", "C": "sp", "D": "so"}[kind], n)


def enumerate_request(G: GroupSpec, algebra: str, n: int, **bounds) -> ClassificationTable:
    if algebra == "matrix":
        return enum_matrix_gradings(G, n, **bounds)
    if algebra == "matrix-involution":
        return enum_involution_gradings(G, n, **bounds)
    if algebra == "sl":
        return enum_lie_gradings(G, "A", n, **bounds)
    if algebra == "sp":
        return enum_lie_gradings(G, "C", n, **bounds)
    if algebra == "so":
        return enum_lie_gradings(G, "B" if n % 2 else "D", n, **bounds)
    raise ParameterError(f"unknown algebra {algebra!r}; expected one of {', '.join(ALGEBRAS)}")
