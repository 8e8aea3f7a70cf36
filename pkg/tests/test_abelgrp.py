import numpy as np
import pytest

from pgrl.abelgrp import (FiniteAbelianType, FiniteMatrixGroup, abelian_type,
                          block_diagonal, d_phi, diagonal_group,
                          enumerate_elements, jordan_block_family, mho_t,
                          o_p_part, omega_index_check, omega_t,
                          p_prime_order_check, singer_cycle,
                          unipotent_jordan_block, unit_group_of_algebra,
                          verbal_w_index, zero_ideal_unit_check)
from pgrl.core import (CapExceeded, InternalInvariantViolation, NonAbelian,
                       NonCommutativeInput, NotAPGroup, NotInvertible,
                       ShapeError)
from pgrl.exactla import Matrix
from pgrl.matalg import (diagonal_algebra, full_matrix_algebra,
                         generate_algebra, polynomial_algebra)
from pgrl.verifier import unitriangular_group


def _c4_times_c2() -> FiniteMatrixGroup:
    c4 = unipotent_jordan_block(3, 2)
    c2 = unipotent_jordan_block(2, 2)
    return FiniteMatrixGroup(
        [
            block_diagonal([c4, Matrix.identity(2, 2)]),
            block_diagonal([Matrix.identity(3, 2), c2]),
        ]
    )


def _s3() -> FiniteMatrixGroup:
    return FiniteMatrixGroup([Matrix([[0, 1], [1, 0]], 2), Matrix([[1, 1], [0, 1]], 2)])


def test_enumeration_starts_with_identity() -> None:
    group = FiniteMatrixGroup([unipotent_jordan_block(3, 2)])
    elements = enumerate_elements(group)
    assert len(elements) == 4
    assert elements[0].is_identity()
    assert len(set(elements)) == 4
    assert group.enumerated == 4
    assert group.contains(elements[3])
    assert not group.contains(Matrix.identity(2, 2))


def test_trivial_group() -> None:
    group = FiniteMatrixGroup([], n=3, p=5)
    assert group.order == 1
    assert group.is_abelian()
    assert abelian_type(group).cyclic_factors() == []
    assert str(abelian_type(group)) == "1"


def test_invalid_generators() -> None:
    with pytest.raises(NotInvertible):
        FiniteMatrixGroup([Matrix([[1, 1], [1, 1]], 2)])
    with pytest.raises(ShapeError):
        FiniteMatrixGroup([Matrix.identity(2, 2), Matrix.identity(3, 2)])
    with pytest.raises(ShapeError):
        FiniteMatrixGroup([Matrix.identity(2, 2), Matrix.identity(2, 3)])
    with pytest.raises(ShapeError):
        FiniteMatrixGroup([], p=2)


def test_from_elements_requires_a_subgroup() -> None:
    block = unipotent_jordan_block(3, 2).data
    with pytest.raises(InternalInvariantViolation):
        FiniteMatrixGroup.from_elements(np.array([np.eye(3, dtype=np.int64), block]), 3, 2)


def test_cap() -> None:
    with pytest.raises(CapExceeded):
        FiniteMatrixGroup([unipotent_jordan_block(3, 2)], cap=3).order
    assert FiniteMatrixGroup([unipotent_jordan_block(3, 2)], cap=4).order == 4


def test_cap_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("PGRL_MAX_ENUM", "4")
    with pytest.raises(CapExceeded):
        unitriangular_group(3, 2).order
    monkeypatch.setenv("PGRL_MAX_ENUM", "8")
    assert unitriangular_group(3, 2).order == 8
    monkeypatch.setenv("PGRL_MAX_ENUM", "many")
    with pytest.raises(ValueError):
        unitriangular_group(3, 2)


def test_jordan_block() -> None:
    group = FiniteMatrixGroup([unipotent_jordan_block(3, 2)])
    assert str(abelian_type(group)) == "C4"
    assert omega_index_check(group) == (2, True)
    assert verbal_w_index(group) == 4
    assert d_phi(group) == 1
    assert group.exponent() == 4


def test_diagonal_group_over_f5() -> None:
    group = diagonal_group([[2, 1], [1, 3]], 5)
    assert group.order == 16
    assert abelian_type(group).cyclic_factors() == [4, 4]
    assert o_p_part(group).order == 1
    assert omega_index_check(group) == (16, True)
    result = p_prime_order_check(group)
    assert result["measured"] == 16
    assert result["expected"] == 24
    assert result["ok"]


def test_c4_times_c2() -> None:
    group = _c4_times_c2()
    kind = abelian_type(group)
    assert kind == FiniteAbelianType({2: ((4, 1), (2, 1))})
    assert kind.as_dict() == {"2": [[4, 1], [2, 1]]}
    assert str(kind) == "C4 x C2"
    assert kind.order == 8
    assert omega_t(group, 1).order == 4
    assert omega_t(group, 2).order == 8
    assert mho_t(group, 1).order == 2
    assert d_phi(group) == 1
    assert verbal_w_index(group) == 8


def test_mixed_primes() -> None:
    # diag(2) over F_3 has order 2, the unipotent part order 3
    group = FiniteMatrixGroup(
        [Matrix([[1, 1, 0], [0, 1, 0], [0, 0, 1]], 3), Matrix.diagonal([1, 1, 2], 3)]
    )
    assert group.order == 6
    assert abelian_type(group).as_dict() == {"2": [[2, 1]], "3": [[3, 1]]}
    assert o_p_part(group).order == 3
    assert p_prime_order_check(group)["measured"] == 2
    index, ok = omega_index_check(group)
    assert index == 2 and ok


def test_non_abelian_and_non_p_groups() -> None:
    group = _s3()
    assert group.order == 6
    with pytest.raises(NonAbelian):
        abelian_type(group)
    with pytest.raises(NonAbelian):
        omega_t(group, 1)
    with pytest.raises(NotAPGroup):
        group.require_p_group()
    with pytest.raises(NotAPGroup):
        group.frattini_subgroup()


def test_unitriangular_invariants() -> None:
    ut2 = unitriangular_group(3, 2)
    assert ut2.order == 8
    assert verbal_w_index(ut2) == 4
    assert ut2.exponent() == 4
    assert ut2.center().order == 2
    assert ut2.commutator_subgroup().order == 2
    assert ut2.generator_rank() == 2

    ut3 = unitriangular_group(3, 3)
    assert ut3.order == 27
    assert verbal_w_index(ut3) == 9
    assert ut3.exponent() == 3
    assert ut3.frattini_subgroup().order == 3
    assert ut3.generator_rank() == 2
    assert ut3.is_normal(ut3.center())


@pytest.mark.parametrize("k, p", [(1, 2), (2, 2), (3, 2), (1, 3)])
def test_jordan_block_family(k: int, p: int) -> None:
    group = jordan_block_family(k, p)
    assert group.n == k * (p + 1)
    assert group.order == p ** (2 * k)
    assert d_phi(group) == k
    assert group.exponent() == p * p
    index, ok = omega_index_check(group)
    assert index == p**k and ok


@pytest.mark.parametrize("n, p, order", [(2, 2, 3), (3, 2, 7), (2, 3, 8), (4, 2, 15)])
def test_singer_cycle(n: int, p: int, order: int) -> None:
    m = singer_cycle(n, p)
    group = FiniteMatrixGroup([m])
    assert group.order == order
    assert group.element_order(m) == order


def test_unit_groups() -> None:
    assert unit_group_of_algebra(diagonal_algebra(2, 3)).order == 4
    assert unit_group_of_algebra(diagonal_algebra(3, 2)).order == 1
    jordan = Matrix(np.eye(3, k=1, dtype=np.int64), 2)
    units = unit_group_of_algebra(polynomial_algebra(jordan))
    assert str(abelian_type(units)) == "C4"
    # the identity is adjoined to a non-unital algebra
    assert unit_group_of_algebra(generate_algebra([jordan])).order == 4
    with pytest.raises(NonCommutativeInput):
        unit_group_of_algebra(full_matrix_algebra(2, 2))
    with pytest.raises(CapExceeded):
        unit_group_of_algebra(diagonal_algebra(3, 5), cap=100)


def test_random_unit_groups(commutative_algebra, rng: np.random.Generator) -> None:
    for case in range(120):
        p = (2, 3)[case % 2]
        alg = commutative_algebra(rng, p, 6)
        units = unit_group_of_algebra(alg)
        invertible = sum(1 for x in alg.elements() if x.is_invertible())
        assert units.order == invertible
        assert units.is_abelian()
        assert abelian_type(units).order == units.order
        index, ok = omega_index_check(units)
        assert ok, (alg, index)
        assert p_prime_order_check(units)["ok"]
        assert d_phi(units) <= alg.n
        assert all(c["ok"] for c in zero_ideal_unit_check(alg))
