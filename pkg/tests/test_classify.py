import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradings.abgroup import GroupSpec, subgroup_generate, trivial_subgroup, whole_group
from gradings.bichar import Bicharacter, quadratic_form, trivial_bichar
from gradings.classify import (RefusedError, brute_force_iso, canonical_form, canonical_key, decode_key,
                               equiv_shift_perm, equiv_star, equiv_star_m0, iso_any, iso_graded_involution, iso_lie,
                               iso_matrix_gradings)
from gradings.cyclotomic import RootOfUnity
from gradings.enumeration import (enum_involution_gradings, enum_lie_gradings, enum_matrix_gradings,
                                  involution_parameters, type_II_parameters)
from gradings.graded_matrix import MatrixGradingParams, ParameterError
from gradings.involution import InvolutionParams, StructuredKappaGamma
from gradings.lie_grading import LieGradingParams

Z2, Z3, Z4 = GroupSpec.cyclic(2), GroupSpec.cyclic(3), GroupSpec.cyclic(4)
Z2_2 = GroupSpec.cyclic(2, 2)


def elementary(G, kappa, gamma):
    T = trivial_subgroup(G)
    return MatrixGradingParams(G, T, trivial_bichar(T), kappa, tuple(gamma))


def a_one(G, kappa, gamma):
    T = trivial_subgroup(G)
    return LieGradingParams("A_I", G, T, trivial_bichar(T), tuple(kappa), tuple(gamma))


def pauli(G=Z2_2, gamma=((0, 0),)):
    T = whole_group(G)
    return MatrixGradingParams(G, T, Bicharacter(T, 2, [[0, 1], [1, 0]]), (1,), gamma)


def multiset_oracle(p1, p2):
    """Equivalence by comparing multisets of (size, coset) after every shift."""
    if p1.T != p2.T or p1.beta.canonical() != p2.beta.canonical():
        return False
    G, T = p1.G, p1.T

    def coset(g):
        return min(G.op(g, t) for t in T.elements)

    target = sorted((k, coset(g)) for k, g in zip(p2.kappa, p2.gamma))
    return any(sorted((k, coset(G.op(g, s))) for k, g in zip(p1.kappa, p1.gamma)) == target for s in G.elements())


# -- shift / permutation ------------------------------------------------------

def test_shift_perm_examples():
    T = trivial_subgroup(Z2)
    assert equiv_shift_perm(Z2, T, (1, 2), ((0,), (1,)), (1, 2), ((0,), (1,))) is not None
    assert equiv_shift_perm(Z2, T, (1, 1), ((0,), (1,)), (1, 1), ((1,), (0,))) is not None
    T = trivial_subgroup(Z4)
    assert equiv_shift_perm(Z4, T, (1, 2), ((0,), (1,)), (1, 2), ((0,), (3,))) is None
    w = equiv_shift_perm(Z4, T, (1, 1), ((0,), (1,)), (1, 1), ((1,), (2,)))
    assert w is not None and w.shift == (1,)


def test_shift_perm_exhaustive_z4_oracle():
    # exhaust the 2 |T| candidate shifts by hand: only shifts 0..3 exist
    for g1, g2 in itertools.product(range(1, 4), repeat=2):
        a, b = elementary(Z4, (1, 2), [(0,), (g1,)]), elementary(Z4, (1, 2), [(0,), (g2,)])
        assert (iso_matrix_gradings(a, b) is not None) == (g1 == g2)


def test_shift_perm_infinite_group():
    Z = GroupSpec(1, ())
    T = trivial_subgroup(Z)
    assert equiv_shift_perm(Z, T, (1, 1), ((0,), (5,)), (1, 1), ((-2,), (3,))) is not None
    assert equiv_shift_perm(Z, T, (1, 1), ((0,), (5,)), (1, 1), ((0,), (4,))) is None


# -- matrix gradings ----------------------------------------------------------

def test_iso_matrix_examples():
    assert iso_matrix_gradings(pauli(), elementary(Z2_2, (1, 1), [(0, 0), (1, 0)])) is None
    assert iso_matrix_gradings(elementary(Z4, (1, 1), [(0,), (1,)]), elementary(Z4, (1, 1), [(1,), (2,)]))
    with pytest.raises(ParameterError):
        iso_matrix_gradings(elementary(Z2, (2,), [(0,)]), elementary(Z4, (2,), [(0,)]))


def test_pauli_shift_is_absorbed_by_support():
    # gamma lives in G/T and T = G, so every shift is the same grading
    assert iso_matrix_gradings(pauli(), pauli(gamma=((1, 1),)))
    assert canonical_key(pauli()) == canonical_key(pauli(gamma=((1, 0),)))


def test_matrix_keys_match_oracle_m4_over_z2_squared():
    ps = [e.params for e in enum_matrix_gradings(Z2_2, 4).entries]
    raw = []
    for p in ps:
        raw.append(p)
        raw.append(dataclasses.replace(p, gamma=tuple(reversed(p.gamma)), kappa=tuple(reversed(p.kappa))))
    for p, q in itertools.combinations(raw, 2):
        o = multiset_oracle(p, q)
        assert (canonical_key(p) == canonical_key(q)) == o
        assert (iso_matrix_gradings(p, q) is not None) == o
        assert brute_force_iso(p, q) == o


def test_canonical_form_is_fixed_and_keyed():
    for e in enum_matrix_gradings(GroupSpec.cyclic(2, 4), 4).entries:
        c = canonical_form(e.params)
        assert canonical_form(c) == c
        assert iso_matrix_gradings(c, e.params) is not None
        assert canonical_key(c) == e.key


def test_key_format():
    k = canonical_key(pauli())
    assert k.startswith("gk1:") and all(ch in "0123456789abcdef" for ch in k[4:])
    assert decode_key(k) is not None
    with pytest.raises(ParameterError):
        decode_key("zz:00")


def test_key_refused_for_infinite_groups():
    Z = GroupSpec(1, ())
    with pytest.raises((RefusedError, ParameterError)):
        canonical_key(elementary(Z, (1, 1), [(0,), (1,)]))


# -- involutions --------------------------------------------------------------

def _inv(G, T, beta, sg, tau, delta):
    return InvolutionParams(G, T, beta, sg, tuple(tau), delta)


def test_equiv_star_examples():
    T = trivial_subgroup(Z2_2)
    sg = StructuredKappaGamma(0, 0, 1, (1,), [], [((0, 0), (1, 0))])
    sw = StructuredKappaGamma(0, 0, 1, (1,), [], [((1, 0), (0, 0))])
    assert equiv_star(Z2_2, T, sg, (), sg, ()) is not None
    assert equiv_star_m0(Z2_2, T, sg, sw) is not None


def _m0_oracle(G, T, p1, p2, products=True):
    """Shift g and optional swap with matching cosets and (when asked) g' g'' = f' f'' g^2 on the nose."""
    for g in G.elements():
        for a, b in (p1, p1[::-1]):
            if all(G.div(G.op(x, g), y) in T for x, y in ((a, p2[0]), (b, p2[1]))) \
                    and (not products or G.op(*p2) == G.mul(a, b, g, g)):
                return True
    return False


# T must be an elementary 2-group
@pytest.mark.parametrize("shape, T", [((4,), []), ((4,), [(2,)]), ((8,), [(4,)]), ((2, 4), [(1, 0), (0, 2)]),
                                      ((2, 4), [(1, 2)])])
def test_equiv_star_m0_against_oracle(shape, T):
    G = GroupSpec.cyclic(*shape)
    S = subgroup_generate(G, T)
    sg = lambda a, b: StructuredKappaGamma(0, 0, 1, (1,), [], [(a, b)])
    pairs = [(a, b) for a in G.elements() for b in G.elements() if G.div(a, b) not in S]
    for p1, p2 in itertools.product(pairs, repeat=2):
        got = equiv_star_m0(G, S, sg(*p1), sg(*p2)) is not None
        assert got == _m0_oracle(G, S, p1, p2)
        assert got == (equiv_star(G, S, sg(*p1), (), sg(*p2), ()) is not None)


def test_product_condition_bites():
    # over Z8 with T = <4> the cosets of (0,1) and (0,5) agree, yet no shift fixes the product
    G = GroupSpec.cyclic(8)
    S = subgroup_generate(G, [(4,)])
    assert _m0_oracle(G, S, ((0,), (1,)), ((0,), (5,)), products=False)
    assert not _m0_oracle(G, S, ((0,), (1,)), ((0,), (5,)))
    sg = lambda a, b: StructuredKappaGamma(0, 0, 1, (1,), [], [((a,), (b,))])
    assert equiv_star_m0(G, S, sg(0, 1), sg(0, 5)) is None
    assert equiv_star_m0(Z4, trivial_subgroup(Z4), sg(0, 1), sg(0, 3)) is not None


def test_iso_involution_examples():
    T = whole_group(Z2_2)
    beta = Bicharacter(T, 2, [[0, 1], [1, 0]])
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    q1 = _inv(Z2_2, T, beta, sg, [(0, 0)], 1)
    assert iso_graded_involution(q1, q1) is not None
    q2 = dataclasses.replace(q1, delta=-1)
    assert iso_graded_involution(q1, q2) is None
    # tau = ab has beta(ab) = -1 while tau = a has beta(a) = 1
    Q = quadratic_form(beta)
    qa = _inv(Z2_2, T, beta, sg, [(1, 0)], 1)
    qab = _inv(Z2_2, T, beta, sg, [(1, 1)], -1)
    assert iso_graded_involution(qa, qab) is None
    assert Q((1, 0)) != Q((1, 1))


# -- Lie gradings ------------------------------------------------------------

def test_discriminating_pair():
    p, q = elementary(Z3, (1, 2), [(0,), (1,)]), elementary(Z3, (1, 2), [(0,), (2,)])
    assert iso_matrix_gradings(p, q) is None
    w = iso_lie(a_one(Z3, (1, 2), [(0,), (1,)]), a_one(Z3, (1, 2), [(0,), (2,)]))
    assert w is not None and w.branch == "inverse"


def test_sl2_over_z4_pair_sets():
    # degrees {1, 3} against {2}
    assert iso_lie(a_one(Z4, (1, 1), [(0,), (1,)]), a_one(Z4, (1, 1), [(0,), (2,)])) is None
    assert iso_lie(a_one(Z4, (1, 1), [(0,), (1,)]), a_one(Z4, (1, 1), [(0,), (3,)])) is not None


def test_c_vs_d_and_families():
    T = trivial_subgroup(Z2)
    sg = StructuredKappaGamma(0, 1, 1, (5,), [(0,)], [])
    c = LieGradingParams("C", Z2, T, trivial_bichar(T), structure=sg, tau=((0,),), delta=-1)
    d = LieGradingParams("D", Z2, T, trivial_bichar(T), structure=sg, tau=((0,),), delta=1)
    assert iso_lie(c, d) is None
    assert iso_any(c, elementary(Z2, (10,), [(0,)])) is None
    # so_6 is isomorphic to sl_4, so the D family starts at n = 10
    small = LieGradingParams("D", Z2, T, trivial_bichar(T), structure=StructuredKappaGamma(0, 1, 1, (3,), [(0,)], []),
                             tau=((0,),), delta=1)
    with pytest.raises(RefusedError):
        iso_lie(small, small)


def test_so8_refused():
    T = trivial_subgroup(Z2)
    sg = StructuredKappaGamma(0, 1, 1, (4,), [(0,)], [])
    p = LieGradingParams("D", Z2, T, trivial_bichar(T), structure=sg, tau=((0,),), delta=1)
    with pytest.raises(RefusedError):
        iso_lie(p, p)
    with pytest.raises(RefusedError):
        canonical_key(p)


def test_type_ii3_mu_shift():
    """Over Z4 with h = 2, shifting by g = 1 multiplies mu by chi^2(1) = -1."""
    ps = [p for p in type_II_parameters(Z4, 4) if p.variant == "A_II3"]
    assert {p.mu for p in ps} == {RootOfUnity(4, 1), RootOfUnity(4, 3)}
    p, q = ps
    assert q.mu == p.mu * RootOfUnity(2, 1)
    assert iso_lie(p, q) is not None and brute_force_iso(p, q)
    assert canonical_key(p) == canonical_key(q)
    assert enum_lie_gradings(Z4, "A", 4).counts()["A_II3"] == 1


def _swap_blocks(p):
    sg = p.structure
    flip = lambda xs: tuple(reversed(xs))
    sg2 = StructuredKappaGamma(sg.ell, sg.m, sg.k, flip(sg.q[:2]) + tuple(sg.q[2:]), flip(sg.gamma_single),
                               sg.gamma_pairs)
    return dataclasses.replace(p, structure=sg2, tau=flip(p.tau), delta=flip(p.delta))


def test_type_ii2_delta_vectors():
    ps = [p for p in type_II_parameters(GroupSpec.cyclic(2, 2, 2), 4) if p.variant == "A_II2" and len(p.delta) == 2]
    assert ps
    for p in ps:
        # reordering the blocks together with their signs is the identity permutation in disguise
        assert iso_lie(p, _swap_blocks(p)) is not None
        q = dataclasses.replace(p, delta=tuple(reversed(p.delta)))
        assert (iso_lie(p, q) is not None) == brute_force_iso(p, q)
        if p.delta[0] != p.delta[1] and p.structure.q[0] != p.structure.q[1]:
            assert iso_lie(p, q) is None


# -- properties against the brute-force search --------------------------------

_MATRIX = [e.params for G in (Z2, Z3, Z4, Z2_2) for n in (2, 3, 4) for e in enum_matrix_gradings(G, n).entries]
_INV = [q for G in (Z2, Z4, Z2_2) for n in (2, 3, 4) for q in involution_parameters(G, n)]
_LIE = ([p for G in (Z2_2, Z4) for p in type_II_parameters(G, 4)]
        + [e.params for G in (Z3, Z4, Z2_2) for n in (2, 3) for e in enum_lie_gradings(G, "A", n).entries])


def _relabel(p, data):
    """An equivalent tuple: shift every label and reorder the blocks."""
    if isinstance(p, MatrixGradingParams):
        s = data.draw(st.sampled_from(p.G.elements()))
        order = data.draw(st.permutations(range(len(p.kappa))))
        return dataclasses.replace(p, kappa=tuple(p.kappa[i] for i in order),
                                   gamma=tuple(p.G.op(p.gamma[i], s) for i in order))
    return p


@given(st.sampled_from(_MATRIX), st.data())
def test_matrix_key_invariant_under_relabel(p, data):
    q = _relabel(p, data)
    assert canonical_key(p) == canonical_key(q)
    assert multiset_oracle(p, q)


@given(st.sampled_from(_MATRIX), st.sampled_from(_MATRIX))
def test_matrix_deciders_agree(p, q):
    if p.G != q.G or p.n != q.n:
        return
    o = multiset_oracle(p, q)
    assert (iso_matrix_gradings(p, q) is not None) == o == brute_force_iso(p, q)
    assert (canonical_key(p) == canonical_key(q)) == o


@settings(max_examples=150)
@given(st.sampled_from(_INV), st.sampled_from(_INV))
def test_involution_deciders_agree(p, q):
    if p.G != q.G or p.n != q.n:
        return
    o = brute_force_iso(p, q)
    assert (iso_graded_involution(p, q) is not None) == o
    assert (canonical_key(p) == canonical_key(q)) == o


@settings(max_examples=150)
@given(st.sampled_from(_LIE), st.sampled_from(_LIE))
def test_lie_deciders_agree(p, q):
    if p.G != q.G or p.n != q.n:
        return
    o = brute_force_iso(p, q)
    assert (iso_lie(p, q) is not None) == o
    assert (canonical_key(p) == canonical_key(q)) == o


@given(st.sampled_from(_MATRIX), st.sampled_from(_MATRIX), st.sampled_from(_MATRIX))
def test_equivalence_is_transitive(p, q, r):
    if not (p.G == q.G == r.G and p.n == q.n == r.n):
        return
    if iso_matrix_gradings(p, q) and iso_matrix_gradings(q, r):
        assert iso_matrix_gradings(p, r)
    assert bool(iso_matrix_gradings(p, q)) == bool(iso_matrix_gradings(q, p))


def test_same_group_pairs_exist():
    # the random pair tests above only bite when G and n agree; make sure that happens often
    Gs = [(p.G, p.n) for p in _LIE]
    assert len(set(Gs)) < len(Gs) / 5
