"""
Tests for permutation groups, subgroups, quotients and double cosets
"""

import pytest

from conftest import make_group
from mackey.errors import ContractError, InputError, PreconditionError, SizeCapError
from mackey.group_core import (
    GroupHom,
    all_subgroups,
    compose,
    conjugate_subgroup,
    coset_representatives,
    double_coset_reps,
    element_order,
    ell_core,
    generate_subgroup,
    group_from_generators,
    group_from_table,
    identity_hom,
    inversion_hom,
    is_cyclic,
    is_normal,
    lattice_of,
    make_subgroup,
    opposite_group,
    preimage_subgroup,
    quotient_with_projection,
    require_prime,
    subgroup_generators,
    validate_permutation,
)


def whole(G):
    return make_subgroup(G, G.elements())


def test_compose_applies_right_factor_first():
    assert compose((1, 0, 2), (1, 2, 0)) == (0, 2, 1)


def test_validate_permutation_rejects_non_bijection():
    with pytest.raises(InputError):
        validate_permutation([0, 0, 1], 3)
    with pytest.raises(InputError):
        validate_permutation([0, 1], 3)


@pytest.mark.parametrize("name, order", [
    ("C2", 2), ("C3", 3), ("C4", 4), ("V4", 4), ("S3", 6),
    ("D4", 8), ("Q8", 8), ("A4", 12), ("D6", 12), ("S4", 24),
])
def test_group_orders(name, order):
    G = make_group(name)
    assert G.order == order
    assert G.identity == 0
    assert all(G.mul(g, G.inv(g)) == G.identity for g in G.elements())


def test_trivial_group(trivial_group):
    assert trivial_group.order == 1
    assert len(lattice_of(trivial_group)) == 1


def test_closure_cap_is_enforced():
    degree, gens = 4, [[1, 0, 2, 3], [1, 2, 3, 0]]
    with pytest.raises(SizeCapError) as excinfo:
        group_from_generators(degree, gens, cap=10)
    assert excinfo.value.cap == 10


def test_non_associative_table_is_rejected():
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ContractError):
        group_from_table(loop)


def test_table_without_latin_rows_is_rejected():
    with pytest.raises(ContractError):
        group_from_table([[0, 1], [1, 1]])


@pytest.mark.parametrize("name, count", [
    ("C2", 2), ("C4", 3), ("S3", 6), ("V4", 5), ("D4", 10),
    ("Q8", 6), ("A4", 10), ("D6", 16), ("S4", 30),
])
def test_subgroup_counts(name, count):
    G = make_group(name)
    subgroups = all_subgroups(G)
    assert len(subgroups) == count
    assert subgroups[0].order == 1
    assert subgroups[-1].order == G.order
    keys = [(S.order, S.elements) for S in subgroups]
    assert keys == sorted(keys)


def test_make_subgroup_checks_closure(s3):
    with pytest.raises(InputError):
        make_subgroup(s3, [0, 1, 2])
    with pytest.raises(InputError):
        make_subgroup(s3, [1])


def test_generate_subgroup_and_generators(s4):
    H = generate_subgroup(s4, s4.generators)
    assert H.order == 24
    gens = subgroup_generators(H)
    assert generate_subgroup(s4, gens).elements == H.elements
    assert len(gens) <= 3


def test_element_orders_in_q8(q8):
    orders = sorted(element_order(q8, g) for g in q8.elements())
    assert orders == [1, 2, 4, 4, 4, 4, 4, 4]


def test_conjugation_and_normality(s3):
    lattice = lattice_of(s3)
    order_two = [i for i, S in enumerate(lattice.subgroups) if S.order == 2]
    order_three = [i for i, S in enumerate(lattice.subgroups) if S.order == 3]
    assert len(order_two) == 3 and len(order_three) == 1

    A3 = lattice.subgroups[order_three[0]]
    T = lattice.subgroups[order_two[0]]
    assert is_normal(s3, A3)
    assert not is_normal(s3, T)
    images = {conjugate_subgroup(s3, g, T).elements for g in s3.elements()}
    assert len(images) == 3
    assert all(lattice.conjugate(g, lattice.whole) == lattice.whole for g in s3.elements())


def test_lattice_intersection_and_index(s3):
    lattice = lattice_of(s3)
    a, b = [i for i, S in enumerate(lattice.subgroups) if S.order == 2][:2]
    assert lattice.intersection(a, b) == lattice.trivial
    assert lattice.index(lattice.whole, a) == 3
    assert lattice.contains(lattice.whole, a)
    assert not lattice.contains(a, b)
    assert lattice.subgroups_of(a) == [lattice.trivial, a]


def test_lattice_index_of_rejects_non_subgroup(s3):
    with pytest.raises(InputError):
        lattice_of(s3).index_of([0, 1, 2])


def test_quotient_by_klein_four(s4):
    V = ell_core(s4, whole(s4), 2)
    assert V.order == 4
    Q, pr = quotient_with_projection(s4, V)
    assert Q.order == 6
    assert pr.is_surjective()
    assert pr.kernel().elements == V.elements
    assert any(Q.mul(a, b) != Q.mul(b, a) for a in Q.elements() for b in Q.elements())
    trivial_q = make_subgroup(Q, [Q.identity])
    assert preimage_subgroup(pr, trivial_q).elements == V.elements


def test_quotient_needs_normal_subgroup(s3):
    T = next(S for S in all_subgroups(s3) if S.order == 2)
    with pytest.raises(PreconditionError):
        quotient_with_projection(s3, T)


def test_ell_core_and_cyclicity(s4, c4, v4):
    assert ell_core(s4, whole(s4), 3).order == 1
    assert is_cyclic(whole(c4))
    assert not is_cyclic(whole(v4))


def test_require_prime():
    assert require_prime(7) == 7
    for bad in (1, 4, 0, -3):
        with pytest.raises(InputError):
            require_prime(bad)


def test_cosets_and_double_cosets(s3):
    G = whole(s3)
    T = next(S for S in all_subgroups(s3) if S.order == 2)
    A3 = next(S for S in all_subgroups(s3) if S.order == 3)
    assert len(coset_representatives(G, A3)) == 2
    assert len(coset_representatives(G, T)) == 3
    reps = double_coset_reps(G, T, T)
    assert len(reps) == 2
    assert reps == sorted(reps)
    sizes = sorted(len({s3.mul(s3.mul(k, g), l) for k in T.elements for l in T.elements}) for g in reps)
    assert sizes == [2, 4]


def test_double_cosets_need_containment(s3):
    T = next(S for S in all_subgroups(s3) if S.order == 2)
    A3 = next(S for S in all_subgroups(s3) if S.order == 3)
    with pytest.raises(PreconditionError):
        double_coset_reps(A3, T, A3)


def test_opposite_group_and_inversion(d4):
    op = opposite_group(d4)
    assert op.order == d4.order
    assert all(op.mul(i, j) == d4.mul(j, i) for i in d4.elements() for j in d4.elements())
    assert opposite_group(op).table == d4.table
    inv = inversion_hom(d4)
    assert inv.target == op
    assert identity_hom(d4).images == tuple(d4.elements())


def test_group_hom_rejects_non_homomorphism(s3, c2):
    images = tuple([0] + [1] * (s3.order - 1))
    with pytest.raises(ContractError):
        GroupHom(s3, c2, images)
