import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradings.abgroup import (GroupError, GroupSpec, abelian_groups_of_order, abelian_invariants, all_subgroups,
                              canonical_coset_rep, chi_squared_on_quotient, coset_eq, coset_reps, elem_inv, elem_op,
                              elem_order, is_elementary_2, is_square_shape, quotient_by_order2, rank_2,
                              solve_character, subgroup_basis, subgroup_generate, trivial_subgroup, whole_group)
from gradings.cyclotomic import RootOfUnity

Z2, Z4 = GroupSpec.cyclic(2), GroupSpec.cyclic(4)
Z2_2 = GroupSpec.cyclic(2, 2)


def test_element_arithmetic():
    assert elem_op(Z4, (2,), (2,)) == (0,)
    assert elem_order(Z4, (2,)) == 2
    assert elem_order(GroupSpec(1, (2,)), (1, 0)) == 0
    assert elem_inv(Z4, (1,)) == (3,)
    G = GroupSpec(1, (3,))
    assert elem_op(G, (2, 2), (-5, 2)) == (-3, 1)


def test_mismatched_group_rejected():
    with pytest.raises(GroupError):
        elem_op(Z4, (1,), (1, 0))
    with pytest.raises(GroupError):
        elem_order(Z2_2, (1,))


def test_subgroup_generate():
    assert len(subgroup_generate(Z2_2, [(1, 0), (0, 1)])) == 4
    assert subgroup_generate(Z4, [(2,)]).elements == ((0,), (2,))
    G = GroupSpec.cyclic(2, 2, 2)
    S = subgroup_generate(G, [(1, 1, 0), (0, 1, 1)])
    # product closure by hand: e, the two generators and their product
    assert set(S.elements) == {(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)}
    with pytest.raises(GroupError):
        subgroup_generate(GroupSpec(1, ()), [(1,)])


def test_cosets():
    T = subgroup_generate(Z4, [(2,)])
    assert coset_eq(Z4, (1,), (1,), T)
    assert coset_eq(Z4, (1,), (3,), T)
    assert not coset_eq(Z4, (0,), (3,), T)
    assert canonical_coset_rep(Z4, (3,), T) == (1,)
    assert coset_reps(Z4, T) == [(0,), (1,)]


def test_quotients():
    q = quotient_by_order2(Z2, (1,))
    assert q.quotient.torsion_order == 1
    q = quotient_by_order2(Z4, (2,))
    assert q.quotient.torsion == (2,)
    assert q.project((1,)) == (1,)
    q = quotient_by_order2(Z2_2, (1, 1))
    assert q.quotient.torsion == (2,)
    with pytest.raises(GroupError):
        quotient_by_order2(Z4, (1,))


def test_solve_character():
    chi = solve_character(Z2, (1,))
    assert chi((1,)) == RootOfUnity(2, 1)
    chi = solve_character(Z4, (2,))
    assert chi((1,)) == RootOfUnity(4, 1)
    chi = solve_character(Z2_2, (1, 0))
    assert chi((1, 0)) == RootOfUnity(2, 1)
    assert chi((0, 1)) == RootOfUnity(1, 0)
    with pytest.raises(GroupError):
        solve_character(Z4, (1,))


def test_chi_squared_on_quotient():
    chi = solve_character(Z4, (2,))
    q = quotient_by_order2(Z4, (2,))
    assert chi_squared_on_quotient(chi, q, (0,)) == RootOfUnity(1, 0)
    assert chi_squared_on_quotient(chi, q, (1,)) == RootOfUnity(2, 1)
    s = q.section((1,))
    assert chi.squared(s) == chi.squared(Z4.op(s, q.h))


def test_elementary_2():
    assert is_elementary_2(trivial_subgroup(Z4)) and rank_2(trivial_subgroup(Z4)) == 0
    assert is_elementary_2(whole_group(Z2_2)) and rank_2(whole_group(Z2_2)) == 2
    assert not is_elementary_2(whole_group(Z4))
    with pytest.raises(GroupError):
        rank_2(whole_group(Z4))


def test_abelian_groups_of_order():
    assert [len(abelian_groups_of_order(n)) for n in range(1, 17)] == [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]


def test_invariants_and_shape():
    G = GroupSpec.cyclic(6, 6)
    assert abelian_invariants(whole_group(G)) == {2: [1, 1], 3: [1, 1]}
    assert is_square_shape(whole_group(G))
    assert not is_square_shape(whole_group(GroupSpec.cyclic(2, 4)))
    assert is_square_shape(whole_group(GroupSpec.cyclic(4, 4)))


def test_subgroup_counts():
    # number of subgroups: Z2^2 has 5, Z2^3 has 16, Z4 x Z2 has 8
    assert len(all_subgroups(Z2_2)) == 5
    assert len(all_subgroups(GroupSpec.cyclic(2, 2, 2))) == 16
    assert len(all_subgroups(GroupSpec.cyclic(4, 2))) == 8


# -- properties ---------------------------------------------------------------

groups = st.lists(st.sampled_from([2, 3, 4, 6, 8]), min_size=1, max_size=3).map(lambda t: GroupSpec.cyclic(*t))


@st.composite
def group_with_gens(draw):
    G = draw(groups)
    gens = draw(st.lists(st.tuples(*[st.integers(0, d - 1) for d in G.torsion]), max_size=3))
    return G, subgroup_generate(G, gens)


@given(group_with_gens())
def test_subgroup_closed_and_divides(data):
    G, T = data
    assert G.order % T.order == 0
    assert G.identity in T
    for a, b in itertools.product(T.elements, repeat=2):
        assert G.op(a, G.inv(b)) in T
    assert list(T.elements) == sorted(set(T.elements), key=G.key)


@given(group_with_gens())
def test_basis_is_direct(data):
    G, T = data
    basis = subgroup_basis(T)
    span = subgroup_generate(G, [g for g, _ in basis])
    assert span == T
    prod_orders = 1
    for g, o in basis:
        assert G.elem_order(g) == o
        prod_orders *= o
    assert prod_orders == T.order


@st.composite
def group_and_involution(draw):
    G = draw(groups.filter(lambda G: any(d % 2 == 0 for d in G.torsion)))
    free = draw(st.integers(0, 1))
    G = GroupSpec(free, G.torsion)
    invs = [g for g in itertools.product(*[range(d) for d in G.torsion]) if GroupSpec(0, G.torsion).elem_order(g) == 2]
    h = (0,) * free + draw(st.sampled_from(invs))
    return G, h


@given(group_and_involution())
def test_quotient_section_and_fibres(data):
    G, h = data
    q = quotient_by_order2(G, h)
    assert q.quotient.torsion_order * 2 == G.torsion_order
    assert q.project(h) == q.quotient.identity
    if G.is_finite:
        fibres = {}
        for g in G.elements():
            fibres.setdefault(q.project(g), []).append(g)
        assert all(len(f) == 2 for f in fibres.values())
        for gb in q.quotient.elements():
            assert q.project(q.section(gb)) == gb
    else:
        # free directions survive; sample a window of elements
        for x in range(-3, 4):
            g = (x,) + (0,) * (G.rank - 1)
            assert q.project(q.section(q.project(g))) == q.project(g)


@given(group_and_involution(), st.data())
def test_projection_is_homomorphism(data, draw):
    G, h = data
    q = quotient_by_order2(G, h)
    elems = st.tuples(*([st.integers(-5, 5)] * G.free_rank + [st.integers(0, d - 1) for d in G.torsion]))
    a, b = draw.draw(elems), draw.draw(elems)
    assert q.project(G.op(a, b)) == q.quotient.op(q.project(a), q.project(b))


@given(group_and_involution())
def test_character_deterministic(data):
    G, h = data
    c1, c2 = solve_character(G, h), solve_character(G, h)
    assert c1 == c2
    assert c1(h) == RootOfUnity(2, 1)
    assert all(v == 0 for v in c1.values[:G.free_rank])


elements_z2_z3 = st.tuples(st.integers(-4, 4), st.integers(0, 2))


@given(elements_z2_z3, elements_z2_z3, elements_z2_z3)
def test_canonical_order_is_total(a, b, c):
    G = GroupSpec(1, (3,))
    ka, kb, kc = G.key(a), G.key(b), G.key(c)
    assert (ka < kb) + (kb < ka) + (ka == kb) == 1
    assert (ka == kb) == (a == b)
    if ka < kb and kb < kc:
        assert ka < kc
