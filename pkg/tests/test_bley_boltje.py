"""
Tests for the chain-sum isomorphism and the Möbius identity sums
"""

import pytest

from mackey.abelian_snf import AdditiveInvariant, FinAbGroup, registered_invariants
from mackey.bley_boltje import (
    chain_multiplicities,
    chain_sum,
    hypothesis_holds,
    index_identity_sum,
    moebius_identity_sum,
    verify_bley_boltje,
)
from mackey.errors import InputError
from mackey.gmodule_cohomology import fixed_point_mackey, permutation_module, sign_module, trivial_module
from mackey.mackey_core import scalar_morphism


def cyclic(n):
    return FinAbGroup.cyclic(n)


def whole(M):
    lattice = M.lattice
    return lattice.subgroups[lattice.whole]


@pytest.fixture
def constant_z2(s3):
    return fixed_point_mackey(trivial_module(s3, cyclic(2)))


def test_chain_multiplicities_on_s3(constant_z2):
    lattice = constant_z2.lattice
    top = lattice.whole
    odd = chain_multiplicities(lattice, top, "odd")
    even = chain_multiplicities(lattice, top, "even")
    assert odd[lattice.trivial] == 1 and even[lattice.trivial] == 4
    assert odd[top] == 0 and even[top] == 1
    for u in range(1, top):
        assert (odd[u], even[u]) == (1, 0)
    with pytest.raises(InputError):
        chain_multiplicities(lattice, top, "both")


def test_constant_functor_on_s3_at_two(constant_z2):
    result = verify_bley_boltje(constant_z2, whole(constant_z2), 2)
    assert result.odd_sum == FinAbGroup((2,) * 10)
    assert result.even_sum == FinAbGroup((2,) * 10)
    assert result.isomorphic
    assert result.hypothesis_holds
    assert result.chain_counts == {0: 1, 1: 5, 2: 4}
    data = result.to_dict()
    assert data["chain_counts"] == {"0": 1, "1": 5, "2": 4}


def test_moebius_sums_vanish_on_s3(constant_z2):
    H = whole(constant_z2)
    for m in registered_invariants([2, 3]):
        assert moebius_identity_sum(constant_z2, H, m, 2) == 0
        assert moebius_identity_sum(constant_z2, H, m) == 0


@pytest.mark.parametrize("module", ["permutation", "sign"])
def test_other_modules_on_s3(s3, module):
    A = permutation_module(s3, 2) if module == "permutation" else sign_module(s3, 4)
    M = fixed_point_mackey(A)
    H = whole(M)
    result = verify_bley_boltje(M, H, 2)
    assert result.hypothesis_holds
    assert result.isomorphic
    for m in registered_invariants([2]):
        assert moebius_identity_sum(M, H, m, 2) == 0


def test_cyclic_group_is_informational(c4):
    M = fixed_point_mackey(trivial_module(c4, cyclic(2)))
    H = whole(M)
    assert not hypothesis_holds(c4, H, 2)
    result = verify_bley_boltje(M, H, 2)
    assert not result.hypothesis_holds
    assert not result.isomorphic
    assert moebius_identity_sum(M, H, AdditiveInvariant("length"), 2) == 2


def test_integral_variant_on_d6(d6):
    M = fixed_point_mackey(trivial_module(d6, cyclic(4)))
    H = whole(M)
    assert hypothesis_holds(d6, H, None)
    result = verify_bley_boltje(M, H)
    assert result.hypothesis_holds
    assert result.isomorphic
    assert result.ell is None
    for m in registered_invariants([2, 3]):
        assert moebius_identity_sum(M, H, m) == 0


@pytest.mark.parametrize("module", ["permutation", "sign"])
def test_integral_variant_on_d6_with_nontrivial_action(d6, module):
    A = permutation_module(d6, 2) if module == "permutation" else sign_module(d6, 4)
    M = fixed_point_mackey(A)
    H = whole(M)
    result = verify_bley_boltje(M, H)
    assert result.hypothesis_holds
    assert result.isomorphic
    for m in registered_invariants([2, 3]):
        assert moebius_identity_sum(M, H, m) == 0


def test_integral_hypothesis_fails_on_hypoelementary(s3, constant_z2):
    assert not hypothesis_holds(s3, whole(constant_z2), None)


def test_chain_sum_at_a_proper_subgroup(constant_z2):
    lattice = constant_z2.lattice
    T = next(S for S in lattice.subgroups if S.order == 2)
    assert chain_sum(constant_z2, T, 2, "even") == FinAbGroup((2, 2))
    assert chain_sum(constant_z2, T, 2, "odd") == cyclic(2)


def test_non_prime_ell_is_rejected(constant_z2):
    with pytest.raises(InputError):
        verify_bley_boltje(constant_z2, whole(constant_z2), 4)


def test_index_identity_on_doubling(s3):
    M = fixed_point_mackey(trivial_module(s3, cyclic(4)))
    f = scalar_morphism(M, 2)
    H = whole(M)
    assert index_identity_sum(f, H) == 0
    assert index_identity_sum(f, H, 2) == 0
