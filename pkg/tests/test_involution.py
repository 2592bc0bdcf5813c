import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradings import kmatrix as km
from gradings.abgroup import GroupSpec, all_subgroups, is_elementary_2, trivial_subgroup, whole_group
from gradings.bichar import Bicharacter, quadratic_form, trivial_bichar
from gradings.cyclotomic import CycloNum, RootOfUnity
from gradings.enumeration import enum_bicharacters, involution_parameters
from gradings.graded_matrix import ParameterError, verify_associative_grading
from gradings.involution import (StructuredKappaGamma, admissible_options, build_anti_automorphism,
                                 build_involution, check_star_admissible, common_value, involution_sign,
                                 normalize_to_eq8, verify_involution, with_phi)
from gradings.kmatrix import KArray

Z2, Z4, Z2_2 = GroupSpec.cyclic(2), GroupSpec.cyclic(4), GroupSpec.cyclic(2, 2)
E1 = GroupSpec(0, ())


def mat(rows, N=1):
    return KArray.from_entries(N, rows)


def trivial(G):
    T = trivial_subgroup(G)
    return T, trivial_bichar(T)


def pauli():
    T = whole_group(Z2_2)
    return T, Bicharacter(T, 2, [[0, 1], [1, 0]])


def test_structure_validation():
    sg = StructuredKappaGamma(1, 2, 3, (1, 2, 1), [(0,), (1,)], [((0,), (1,))])
    assert sg.kappa() == (1, 4, 1, 1)
    assert sg.gamma() == ((0,), (1,), (0,), (1,))
    with pytest.raises(ParameterError):
        StructuredKappaGamma(1, 1, 1, (2,), [(0,)], [])
    with pytest.raises(ParameterError):
        StructuredKappaGamma(2, 1, 1, (1,), [(0,)], [])


def test_admissibility_examples():
    T, beta = pauli()
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    opts = admissible_options(Z2_2, T, beta, sg)
    # a single odd block is always admissible and t_1 ranges over all of T
    assert sorted(o.tau[0] for o in opts) == sorted(T.elements)
    T4, b4 = trivial(Z4)
    sg = StructuredKappaGamma(0, 2, 2, (1, 1), [(0,), (1,)], [])
    assert check_star_admissible(Z4, T4, b4, sg) is None


def test_check_star_admissible_sign_condition():
    # two odd blocks need beta(t_1) = beta(t_2)
    T, beta = pauli()
    G = GroupSpec.cyclic(2, 2, 4)
    T = whole_group(Z2_2)
    sg = StructuredKappaGamma(2, 2, 2, (1, 1), [(0, 0), (1, 0)], [])
    res = check_star_admissible(Z2_2, T, beta, sg)
    assert res is not None
    tau, delta = res
    Q = quadratic_form(beta)
    assert Q(tau[0]) == Q(tau[1]) == delta


def test_normalize_to_eq8():
    T, beta = pauli()
    sg = StructuredKappaGamma(0, 0, 1, (1,), [], [((0, 0), (1, 0))])
    assert normalize_to_eq8(Z2_2, sg, [(0, 0)]) == sg
    out = normalize_to_eq8(Z2_2, sg, [(1, 1)])
    assert out.gamma_pairs == (((0, 0), (0, 1)),)
    # cosets mod T are unchanged because t lies in T
    a, b = out.gamma_pairs[0]
    assert Z2_2.div(b, sg.gamma_pairs[0][1]) in T


def test_transpose_on_m2():
    T, b = trivial(Z2)
    sg = StructuredKappaGamma(2, 2, 2, (1, 1), [(0,), (1,)], [])
    A = build_involution(Z2, T, b, sg, [(0,), (0,)], 1)
    assert A.Phi == KArray.identity(A.Phi.N, 2)
    assert verify_involution(A).ok and involution_sign(A) == 1


def test_symplectic_on_m2():
    T, b = trivial(E1)
    sg = StructuredKappaGamma(0, 0, 1, (1,), [], [((), ())])
    A = build_involution(E1, T, b, sg, [], -1)
    assert A.Phi == mat([[0, 1], [-1, 0]])
    assert verify_involution(A).ok and involution_sign(A) == -1


def test_pauli_with_involution():
    T, beta = pauli()
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    A = build_involution(Z2_2, T, beta, sg, [(1, 1)], -1)
    assert A.Phi == mat([[0, -1], [1, 0]])
    assert verify_involution(A).ok and involution_sign(A) == -1
    with pytest.raises(ParameterError):
        build_involution(Z2_2, T, beta, sg, [(1, 1)], 1)


def test_transpose_on_pauli_grading():
    T, beta = pauli()
    Q = quadratic_form(beta)
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    A = build_involution(Z2_2, T, beta, sg, [(0, 0)], 1)
    assert A.Phi == KArray.identity(A.Phi.N, 2)
    assert verify_involution(A).ok
    for i, t in enumerate(A.R.degrees):
        X = A.R.mats[i]
        assert X.T == X.scale(Q(t))


def test_anti_automorphism_examples():
    T, b = trivial(E1)
    sg = StructuredKappaGamma(0, 0, 1, (1,), [], [((), ())])
    A = build_anti_automorphism(E1, T, b, sg, [], [-1])
    assert A.Phi == build_involution(E1, T, b, sg, [], -1).Phi
    # with a non-sign mu the paired blocks need distinct cosets, or phi^2 moves R_e
    T2, b2 = trivial(Z2)
    sg2 = StructuredKappaGamma(0, 0, 1, (1,), [], [((0,), (1,))])
    A = build_anti_automorphism(Z2, T2, b2, sg2, [], [RootOfUnity(4, 1)])
    assert verify_involution(A).ok
    assert not verify_involution(build_anti_automorphism(E1, T, b, sg, [], [RootOfUnity(4, 1)])).ok
    # phi^2 is conjugation by C = (Phi^T)^-1 Phi, a multiple of diag(i, -i)
    C = km.inverse(A.Phi.T) @ A.Phi
    assert C.entry(0, 1).is_zero() and C.entry(1, 0).is_zero()
    assert C.entry(0, 0) / C.entry(1, 1) == CycloNum.rational(-1)
    Ci = km.inverse(C)
    twice = A.apply(A.apply(A.R.mats))
    for i in range(A.R.dim):
        assert twice[i] == Ci @ A.R.mats[i] @ C
    with pytest.raises(ParameterError):
        build_anti_automorphism(E1, T, b, sg, [], [0])
    # with all mu = 1 and m = k it is the involution
    T, beta = pauli()
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    A = build_anti_automorphism(Z2_2, T, beta, sg, [(1, 1)], [])
    assert A.Phi == build_involution(Z2_2, T, beta, sg, [(1, 1)], -1).Phi


def test_verify_transpose_on_trivial_grading():
    T, b = trivial(E1)
    sg = StructuredKappaGamma(1, 1, 1, (3,), [()], [])
    A = build_involution(E1, T, b, sg, [()], 1)
    assert verify_involution(A).ok and involution_sign(A) == 1


def test_non_block_phi_reported():
    T, beta = pauli()
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    A = build_involution(Z2_2, T, beta, sg, [(0, 0)], 1)
    bad = with_phi(A, mat([[1, 1], [0, 1]]))
    rep = verify_involution(bad)
    assert not rep.ok
    assert any(v["reason"] == "phi moves the component" for v in rep.violations)


def test_sign_of_non_involution_rejected():
    T, b = trivial(E1)
    sg = StructuredKappaGamma(0, 0, 1, (1,), [], [((), ())])
    A = build_anti_automorphism(E1, T, b, sg, [], [RootOfUnity(4, 1)])
    with pytest.raises(ParameterError):
        involution_sign(A)


def test_non_elementary_support_has_no_involution():
    T = whole_group(GroupSpec.cyclic(4, 4))
    beta = enum_bicharacters(T)[0]
    sg = StructuredKappaGamma(1, 1, 1, (1,), [(0, 0)], [])
    assert admissible_options(T.parent, T, beta, sg) == []
    with pytest.raises(ParameterError):
        build_involution(T.parent, T, beta, sg, [(0, 0)], 1)


def test_division_part_formula():
    """On a division algebra phi(X_t) = beta(t) X_s^-1 X_t X_s for the twist s."""
    from gradings.graded_matrix import standard_division_realization
    for G in (Z2_2, GroupSpec.cyclic(2, 2, 2, 2)):
        T = whole_group(G)
        beta = enum_bicharacters(T)[-1]
        Q = quadratic_form(beta)
        D = standard_division_realization(T, beta)
        sg = StructuredKappaGamma(1, 1, 1, (1,), [G.identity], [])
        for s in T:
            A = build_involution(G, T, beta, sg, [s], Q(s))
            Xs = D.X(s)
            Xs_inv = km.inverse(Xs)
            for t in T:
                assert A.apply(D.X(t)) == (Xs_inv @ D.X(t) @ Xs).scale(Q(t))


# -- involution converse over enumerated data -----------------------------------

_GROUPS = [Z2, Z4, Z2_2, GroupSpec.cyclic(2, 4), GroupSpec.cyclic(2, 2, 2)]
_INV = [q for G in _GROUPS for n in range(1, 5) for q in involution_parameters(G, n)]


@given(st.sampled_from(_INV))
def test_every_involution_has_its_sign(q):
    A = q.build()
    assert verify_involution(A).ok
    assert involution_sign(A) == q.delta
    assert verify_associative_grading(A.R).ok


def _raw_structures(G, T, k_max=2):
    reps = G.elements()
    for ell, m, k in [(1, 1, 1), (0, 1, 1), (0, 0, 1), (2, 2, 2), (1, 2, 2), (1, 1, 2), (0, 2, 2), (0, 1, 2),
                      (0, 0, 2)][: 9 if k_max > 1 else 3]:
        q = (1,) * k
        for singles in itertools.product(reps, repeat=m):
            for pairs in itertools.product(itertools.product(reps, repeat=2), repeat=k - m):
                sg = StructuredKappaGamma(ell, m, k, q, singles, pairs)
                gam = sg.gamma()
                # all 2k - m blocks in distinct cosets of T
                if all(G.div(a, b) not in T for a, b in itertools.combinations(gam, 2)):
                    yield sg


def _builds(G, T, beta, sg):
    """Oracle: try every tau (including the pair twists) and both signs."""
    for tau_full in itertools.product(T.elements, repeat=sg.k):
        nsg = normalize_to_eq8(G, sg, tau_full)
        tau = tau_full[:sg.m]
        if common_value(G, nsg, tau) is None:
            continue
        for delta in (1, -1):
            try:
                A = build_involution(G, T, beta, nsg, tau, delta)
            except ParameterError:
                continue
            if verify_involution(A).ok:
                return True
    return False


@pytest.mark.parametrize("G", [Z2_2, Z4, GroupSpec.cyclic(2, 4)], ids=str)
def test_admissibility_gates_construction(G):
    checked = 0
    for T in all_subgroups(G):
        for beta in enum_bicharacters(T):
            if not is_elementary_2(T):
                continue
            for sg in _raw_structures(G, T, 2 if T.order == 1 else 1):
                assert _builds(G, T, beta, sg) == bool(admissible_options(G, T, beta, sg))
                checked += 1
    assert checked > 0
