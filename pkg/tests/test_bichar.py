import itertools
from math import prod

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradings.abgroup import GroupSpec, subgroup_generate, whole_group
from gradings.bichar import (Bicharacter, BicharacterError, bichar_eq, bichar_eval, bichar_from_basis,
                             is_nondegenerate, quadratic_form, quadratic_form_from_basis, radical, symplectic_basis,
                             trivial_bichar)
from gradings.cyclotomic import RootOfUnity
from gradings.enumeration import enum_bicharacters

ONE, MINUS = RootOfUnity(1, 0), RootOfUnity(2, 1)


def pauli(G=None):
    G = G or GroupSpec.cyclic(2, 2)
    return Bicharacter(whole_group(G), 2, [[0, 1], [1, 0]])


def det_mod2(M):
    M = [row[:] for row in M]
    n = len(M)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] % 2), None)
        if piv is None:
            return 0
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] % 2:
                M[r] = [(x + y) % 2 for x, y in zip(M[r], M[c])]
    return 1


def test_eval_examples():
    b = pauli()
    assert bichar_eval(b, (1, 0), (0, 1)) == MINUS
    for t in b.T:
        assert bichar_eval(b, t, t) == ONE
    for u, v in itertools.product(b.T, repeat=2):
        assert bichar_eval(b, u, v) * bichar_eval(b, v, u) == ONE


def test_membership_checked():
    b = Bicharacter(subgroup_generate(GroupSpec.cyclic(2, 2), [(1, 0)]), 1, [[0]])
    with pytest.raises(BicharacterError):
        bichar_eval(b, (0, 1), (0, 0))


def test_not_alternating_rejected():
    G = GroupSpec.cyclic(3)
    with pytest.raises(BicharacterError):
        Bicharacter(whole_group(G), 3, [[1]])


def test_nondegeneracy_examples():
    G = GroupSpec(0, ())
    assert is_nondegenerate(trivial_bichar(whole_group(G)))
    assert not is_nondegenerate(trivial_bichar(whole_group(GroupSpec.cyclic(2, 2))))
    assert len(radical(trivial_bichar(whole_group(GroupSpec.cyclic(2, 2))))) == 4


def test_z2_4_count_against_rank_oracle():
    """Nondegenerate alternating forms on F_2^4 are the alternating matrices with odd determinant."""
    T = whole_group(GroupSpec.cyclic(2, 2, 2, 2))
    slots = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    found = 0
    oracle = 0
    for vals in itertools.product((0, 1), repeat=6):
        E = [[0] * 4 for _ in range(4)]
        for (i, j), v in zip(slots, vals):
            E[i][j] = E[j][i] = v
        oracle += det_mod2(E)
        found += is_nondegenerate(Bicharacter(T, 2, E))
    assert oracle == found == 28
    assert len(enum_bicharacters(T)) == 28
    assert len(enum_bicharacters(whole_group(GroupSpec.cyclic(2, 2)))) == 1
    assert len(enum_bicharacters(whole_group(GroupSpec(0, ())))) == 1


def test_symplectic_basis_examples():
    sb = symplectic_basis(pauli())
    assert sb.orders == (2,)
    T4 = whole_group(GroupSpec.cyclic(2, 2, 2, 2))
    E = np.zeros((4, 4), int)
    E[0, 1] = E[1, 0] = E[2, 3] = E[3, 2] = 1
    assert symplectic_basis(Bicharacter(T4, 2, E)).orders == (2, 2)
    b3 = Bicharacter(whole_group(GroupSpec.cyclic(3, 3)), 3, [[0, 1], [2, 0]])
    sb3 = symplectic_basis(b3)
    assert sb3.orders == (3,)
    assert sb3.values[0].order() == 3
    with pytest.raises(BicharacterError):
        symplectic_basis(trivial_bichar(whole_group(GroupSpec.cyclic(2, 2))))


def test_quadratic_form_examples():
    T = whole_group(GroupSpec.cyclic(2, 2))
    sb = symplectic_basis(pauli())
    Q = quadratic_form_from_basis(T, sb)
    (a, b), = sb.pairs
    assert Q(T.parent.identity) == 1
    assert (Q(a), Q(b), Q(T.parent.op(a, b))) == (1, 1, -1)
    T4 = whole_group(GroupSpec.cyclic(2, 2, 2, 2))
    E = np.zeros((4, 4), int)
    E[0, 1] = E[1, 0] = E[2, 3] = E[3, 2] = 1
    Q4 = quadratic_form(Bicharacter(T4, 2, E))
    assert sum(1 for t in T4 if Q4(t) == -1) == 6
    b3 = Bicharacter(whole_group(GroupSpec.cyclic(3, 3)), 3, [[0, 1], [2, 0]])
    with pytest.raises(BicharacterError):
        quadratic_form(b3)


def test_bichar_eq_examples():
    b = pauli()
    assert bichar_eq(b, b)
    T = whole_group(GroupSpec.cyclic(3, 3))
    assert not bichar_eq(Bicharacter(T, 3, [[0, 1], [2, 0]]), Bicharacter(T, 3, [[0, 2], [1, 0]]))
    # the same form on generators a, ab
    other = Bicharacter(b.T, 2, [[0, 1], [1, 0]], [(1, 0), (1, 1)])
    assert bichar_eq(b, other)
    for u, v in itertools.product(b.T, repeat=2):
        assert b(u, v) == other(u, v)


# -- properties ----------------------------------------------------------------

def _random_bichar(draw, torsion):
    G = GroupSpec.cyclic(*torsion)
    T = whole_group(G)
    m = len(torsion)
    N = prod(torsion)
    E = [[0] * m for _ in range(m)]
    from math import gcd
    for i in range(m):
        for j in range(i + 1, m):
            step = N // gcd(torsion[i], torsion[j])
            v = draw(st.integers(0, N // step - 1)) * step
            E[i][j], E[j][i] = v, -v % N
    return Bicharacter(T, N, E)


shapes = st.sampled_from([(2, 2), (3, 3), (2, 2, 2, 2), (4, 4), (2, 4, 2, 4), (6, 6), (2, 2, 3, 3), (2, 2, 2)])


@given(st.data(), shapes)
def test_symplectic_round_trip(data, torsion):
    b = _random_bichar(data.draw, torsion)
    if not is_nondegenerate(b):
        with pytest.raises(BicharacterError):
            symplectic_basis(b)
        return
    sb = symplectic_basis(b)
    assert prod(o * o for o in sb.orders) == b.T.order
    rebuilt = bichar_from_basis(b.T, sb)
    assert np.array_equal(_angles(rebuilt), _angles(b))
    for (a1, b1), ell, v in zip(sb.pairs, sb.orders, sb.values):
        assert b(a1, b1) == v and v.order() == ell
    for (i, p), (j, q) in itertools.combinations(enumerate(sb.pairs), 2):
        for x, y in itertools.product(p, q):
            assert b(x, y) == ONE


def _angles(b):
    from fractions import Fraction
    return np.array([[Fraction(int(x), b.N) for x in row] for row in b.table])


@given(st.data(), st.sampled_from([(2, 2), (2, 2, 2, 2), (2, 2, 2, 2, 2, 2)]))
def test_polarization(data, torsion):
    b = _random_bichar(data.draw, torsion)
    if not is_nondegenerate(b):
        return
    Q = quadratic_form(b)
    G = b.T.parent
    assert Q(G.identity) == 1
    for u, v in itertools.product(b.T, repeat=2):
        assert b(u, v).sign() == Q(G.op(u, v)) * Q(u) * Q(v)


@given(st.data(), shapes)
def test_nondegeneracy_is_basis_independent(data, torsion):
    b = _random_bichar(data.draw, torsion)
    c = b.canonical()
    assert bichar_eq(b, c)
    assert is_nondegenerate(b) == is_nondegenerate(c)
