"""
Tests for Smith normal form, abelian groups and their homomorphisms
"""

import math
import random

import pytest
from sympy import Matrix

from mackey.abelian_snf import (
    AbHom,
    AdditiveInvariant,
    FinAbGroup,
    IntMatrix,
    cokernel_of_hom,
    direct_sum,
    ell_primary_part,
    evaluate_invariant,
    fin_ab_from_relations,
    hom_add,
    hom_check_compose,
    hom_equal,
    hom_scale,
    identity_hom,
    image_of_hom,
    is_injective,
    is_isomorphic,
    is_isomorphism,
    is_surjective,
    joint_kernel,
    kernel_of_hom,
    power,
    preimage_element,
    registered_invariants,
    smith_normal_form,
    zero_hom,
)
from mackey.errors import ContractError, InputError, PreconditionError

Z = FinAbGroup((), 1)


def cyclic(n):
    return FinAbGroup.cyclic(n)


def check_smith(A):
    U, D, V = smith_normal_form(A)
    assert U @ A @ V == D
    assert D.is_diagonal()
    diag = [d for d in D.diagonal()]
    assert all(d >= 0 for d in diag)
    nonzero = [d for d in diag if d]
    assert diag[:len(nonzero)] == nonzero
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert abs(Matrix(U.to_rows()).det()) == 1
    assert abs(Matrix(V.to_rows()).det()) == 1
    return diag


def test_smith_normal_form_small_example():
    assert check_smith(IntMatrix.from_rows([[2, 4], [6, 8]])) == [2, 4]


def test_smith_normal_form_rectangular():
    assert check_smith(IntMatrix.from_rows([[4, 6]])) == [2]
    assert check_smith(IntMatrix.from_rows([[0, 0], [0, 0], [0, 3]])) == [3, 0]


@pytest.mark.parametrize("seed", range(500))
def test_smith_normal_form_random_matrices(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 6), rng.randint(1, 6)
    A = IntMatrix.from_rows([[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)])
    diag = check_smith(A)
    if rows == cols:
        det = Matrix(A.to_rows()).det()
        product = 1
        for d in diag:
            product *= d
        assert product == abs(det)


def test_fin_ab_from_relations():
    assert fin_ab_from_relations(2, IntMatrix.from_rows([[2, 4], [6, 8]])) == FinAbGroup((2, 4))
    assert fin_ab_from_relations(2, IntMatrix.from_rows([[2, 2], [0, 2]])) == FinAbGroup((2, 2))
    assert fin_ab_from_relations(2, IntMatrix.from_rows([[4, 6]])) == FinAbGroup((2,), 1)
    assert fin_ab_from_relations(1, IntMatrix.from_rows([[1]])).is_trivial


def test_fin_ab_group_validation():
    with pytest.raises(InputError):
        FinAbGroup((2, 3))
    with pytest.raises(InputError):
        FinAbGroup((1,))
    with pytest.raises(PreconditionError):
        _ = Z.order


def test_fin_ab_group_basics():
    A = FinAbGroup((2, 4))
    assert A.order == 8
    assert A.exponent == 4
    assert len(list(A.elements())) == 8
    assert A.reduce([3, -1]) == (1, 3)
    assert str(A) == "Z/2 + Z/4"
    assert str(FinAbGroup()) == "0"
    assert cyclic(0) == Z
    assert cyclic(1).is_trivial


def test_direct_sum_recombines_primary_parts():
    assert direct_sum([cyclic(2), cyclic(4), cyclic(2)]) == FinAbGroup((2, 2, 4))
    assert direct_sum([cyclic(4), cyclic(3)]) == FinAbGroup((12,))
    assert direct_sum([cyclic(2), cyclic(3), cyclic(4)]) == FinAbGroup((2, 12))
    assert direct_sum([]) == FinAbGroup()
    assert direct_sum([Z, cyclic(5)]) == FinAbGroup((5,), 1)


def test_power_and_isomorphism():
    assert power(cyclic(2), 10) == FinAbGroup((2,) * 10)
    assert is_isomorphic(direct_sum([cyclic(3), cyclic(4)]), cyclic(12))
    assert not is_isomorphic(FinAbGroup((2, 2)), cyclic(4))


def test_ell_primary_part():
    assert ell_primary_part(cyclic(12), 2) == cyclic(4)
    assert ell_primary_part(cyclic(12), 3) == cyclic(3)
    assert ell_primary_part(cyclic(12), 5).is_trivial
    assert ell_primary_part(FinAbGroup((2,), 1), 2) == cyclic(2)
    with pytest.raises(InputError):
        ell_primary_part(cyclic(12), 4)


def test_invariants_on_known_groups():
    A = FinAbGroup((2, 4))
    assert evaluate_invariant(AdditiveInvariant("ell_rank", 2), A) == 2
    assert evaluate_invariant(AdditiveInvariant("ell_length", 2), A) == 3
    assert AdditiveInvariant("length")(A) == 3
    B = FinAbGroup((2, 12))
    assert AdditiveInvariant("ell_rank", 3)(B) == 1
    assert AdditiveInvariant("length")(B) == 4


@pytest.mark.parametrize("seed", range(5))
def test_invariants_are_additive(seed):
    rng = random.Random(seed)
    groups = [cyclic(rng.choice([2, 3, 4, 6, 8, 12])) for _ in range(5)] + [FinAbGroup((2, 4))]
    total = direct_sum(groups)
    for m in registered_invariants([2, 3]):
        assert m(total) == sum(m(A) for A in groups)


def test_invariant_validation():
    with pytest.raises(InputError):
        AdditiveInvariant("rank")
    with pytest.raises(InputError):
        AdditiveInvariant("ell_rank")
    with pytest.raises(InputError):
        AdditiveInvariant("ell_rank", 6)
    with pytest.raises(PreconditionError):
        AdditiveInvariant("length")(Z)
    labels = [m.label for m in registered_invariants([3, 2])]
    assert labels == ["ell_rank(2)", "ell_length(2)", "ell_rank(3)", "ell_length(3)", "length"]


def test_ill_defined_hom_is_rejected():
    with pytest.raises(ContractError):
        AbHom.from_rows(cyclic(2), cyclic(3), [[1]])
    with pytest.raises(ContractError):
        AbHom(cyclic(2), cyclic(4), IntMatrix.from_rows([[1, 0]]))


def test_reduction_map():
    f = AbHom.from_rows(cyclic(4), cyclic(2), [[1]])
    kernel, inclusion = kernel_of_hom(f)
    assert kernel == cyclic(2)
    assert inclusion((1,)) == (2,)
    assert is_surjective(f)
    assert not is_injective(f)


def test_doubling_map():
    f = AbHom.from_rows(cyclic(2), cyclic(4), [[2]])
    assert is_injective(f)
    coker, projection = cokernel_of_hom(f)
    assert coker == cyclic(2)
    assert hom_equal(hom_check_compose(projection, f), zero_hom(cyclic(2), coker))
    assert preimage_element(f, (2,)) == (1,)
    assert preimage_element(f, (1,)) is None
    image, _ = image_of_hom(f)
    assert image == cyclic(2)


def test_multiplication_on_integers():
    f = AbHom.from_rows(Z, Z, [[3]])
    assert kernel_of_hom(f)[0].is_trivial
    assert cokernel_of_hom(f)[0] == cyclic(3)
    assert not is_isomorphism(f)
    assert is_isomorphism(AbHom.from_rows(Z, Z, [[-1]]))


def test_joint_kernel():
    A = cyclic(6)
    to_two = AbHom.from_rows(A, cyclic(2), [[1]])
    to_three = AbHom.from_rows(A, cyclic(3), [[1]])
    assert joint_kernel([to_two])[0] == cyclic(3)
    assert joint_kernel([to_two, to_three])[0].is_trivial
    assert joint_kernel([], source=A)[0] == A
    with pytest.raises(InputError):
        joint_kernel([])


def test_kernel_into_trivial_target():
    A = FinAbGroup((2, 4))
    kernel, inclusion = kernel_of_hom(zero_hom(A, FinAbGroup()))
    assert kernel == A
    assert is_isomorphism(inclusion)


def test_hom_arithmetic():
    A = cyclic(4)
    one = identity_hom(A)
    assert hom_equal(hom_add(one, one), hom_scale(one, 2))
    assert hom_equal(hom_scale(one, 4), zero_hom(A, A))
    with pytest.raises(ContractError):
        hom_check_compose(one, identity_hom(cyclic(2)))


def random_hom(rng, A, B):
    columns = []
    for d in A.invariant_factors:
        scale = B.exponent // math.gcd(d, B.exponent)
        columns.append(B.reduce([scale * rng.randrange(e) for e in B.invariant_factors]))
    return AbHom.from_columns(A, B, columns)


@pytest.mark.parametrize("seed", range(20))
def test_kernel_image_cokernel_orders_match_enumeration(seed):
    rng = random.Random(seed)
    A = direct_sum(cyclic(rng.choice([2, 3, 4, 6, 12])) for _ in range(rng.randint(1, 3)))
    B = direct_sum(cyclic(rng.choice([2, 4, 6, 8])) for _ in range(rng.randint(1, 2)))
    f = random_hom(rng, A, B)
    kernel, _ = kernel_of_hom(f)
    image, _ = image_of_hom(f)
    cokernel, _ = cokernel_of_hom(f)
    in_kernel = sum(1 for x in A.elements() if not any(f(x)))
    images = {f(x) for x in A.elements()}
    assert kernel.order == in_kernel
    assert image.order == len(images)
    assert kernel.order * image.order == A.order
    assert image.order * cokernel.order == B.order
