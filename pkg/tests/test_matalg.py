import itertools

import numpy as np
import pytest

from pgrl.core import InternalInvariantViolation, NotClosedInput, ShapeError
from pgrl.exactla import Matrix, Subspace
from pgrl.matalg import (MatAlgebra, algebra_square, common_kernel,
                         diagonal_algebra, direct_sum, full_matrix_algebra,
                         generate_algebra, image_of_vector, is_commutative,
                         is_ideal, minimal_polynomial, polynomial_algebra)


def _jordan(n: int, p: int) -> Matrix:
    return Matrix(np.eye(n, k=1, dtype=np.int64), p)


def test_generate_single_nilpotent() -> None:
    # N, N^2, ..., N^(n-1) for the nilpotent Jordan block N
    for n in (2, 3, 4):
        alg = generate_algebra([_jordan(n, 2)])
        assert alg.dim == n - 1
        assert not alg.unital
        assert polynomial_algebra(_jordan(n, 2)).dim == n
        assert polynomial_algebra(_jordan(n, 2)).unital


def test_generate_full_matrix_algebra() -> None:
    e12 = Matrix.unit(0, 1, 2, 3)
    e21 = Matrix.unit(1, 0, 2, 3)
    alg = generate_algebra([e12, e21])
    assert alg == full_matrix_algebra(2, 3)
    assert alg.dim == 4
    assert not is_commutative(alg)


def test_generate_without_generators() -> None:
    assert generate_algebra([], n=3, p=2).is_zero()
    assert generate_algebra([], include_identity=True, n=3, p=2).dim == 1
    with pytest.raises(ShapeError):
        generate_algebra([])


def test_generate_mixed_shapes() -> None:
    with pytest.raises(ShapeError):
        generate_algebra([Matrix.identity(2, 2), Matrix.identity(3, 2)])
    with pytest.raises(ShapeError):
        generate_algebra([Matrix.identity(2, 2), Matrix.identity(2, 3)])
    with pytest.raises(ShapeError):
        generate_algebra([Matrix([[1, 0]], 2)])


def test_generated_algebra_is_closed(rng: np.random.Generator) -> None:
    for p in (2, 3, 5):
        for _ in range(10):
            n = int(rng.integers(1, 7))
            gens = [Matrix.random(n, n, p, rng) for _ in range(int(rng.integers(1, 3)))]
            alg = generate_algebra(gens)
            assert alg.is_closed()
            assert all(alg.contains(g) for g in gens)


def test_span_requires_closure() -> None:
    e12 = Matrix.unit(0, 1, 2, 2)
    e21 = Matrix.unit(1, 0, 2, 2)
    with pytest.raises(NotClosedInput):
        MatAlgebra.span([e12, e21])
    assert MatAlgebra.span([e12]).dim == 1


def test_commutativity(commutative_algebra, rng: np.random.Generator) -> None:
    for p in (2, 3, 5):
        for _ in range(10):
            assert is_commutative(commutative_algebra(rng, p, 4))
    assert is_commutative(MatAlgebra.zero(3, 2))
    assert not is_commutative(full_matrix_algebra(2, 2))


def test_algebra_square() -> None:
    alg = generate_algebra([_jordan(4, 3)])
    square = algebra_square(alg)
    assert square.dim == 2
    assert algebra_square(square).dim == 0
    assert algebra_square(MatAlgebra.zero(2, 3)).is_zero()
    unital = diagonal_algebra(3, 2)
    assert algebra_square(unital) == unital


def test_algebra_square_of_corrupt_input() -> None:
    # an unchecked span which is not closed
    space = Subspace(
        [Matrix.unit(0, 1, 3, 2).vectorize(), Matrix.unit(1, 2, 3, 2).vectorize(),
         Matrix.unit(2, 0, 3, 2).vectorize()],
        9,
        2,
    )
    corrupt = MatAlgebra(space, 3, check_closed=False)
    with pytest.raises(InternalInvariantViolation):
        algebra_square(corrupt)


def test_common_kernel_and_image() -> None:
    alg = generate_algebra([_jordan(3, 2)])
    ker = common_kernel(alg)
    assert ker == Subspace([[1, 0, 0]], 3, 2)
    image = image_of_vector(alg, np.array([0, 0, 1]))
    assert image == Subspace([[1, 0, 0], [0, 1, 0]], 3, 2)
    assert image_of_vector(alg, np.array([1, 0, 0])).is_zero()
    assert common_kernel(MatAlgebra.zero(3, 2)).is_full()
    with pytest.raises(ShapeError):
        image_of_vector(alg, np.array([1, 0]))


def test_is_ideal() -> None:
    alg = polynomial_algebra(_jordan(3, 3))
    radical = generate_algebra([_jordan(3, 3)])
    assert is_ideal(radical, alg)
    assert is_ideal(algebra_square(radical), alg)
    assert is_ideal(MatAlgebra.zero(3, 3), alg)
    assert not is_ideal(diagonal_algebra(3, 3), full_matrix_algebra(3, 3))
    assert not is_ideal(diagonal_algebra(3, 3), alg)
    with pytest.raises(ShapeError):
        is_ideal(MatAlgebra.zero(2, 3), alg)


def test_direct_sum() -> None:
    a = polynomial_algebra(_jordan(2, 2))
    b = diagonal_algebra(2, 2)
    total = direct_sum(a, b)
    assert total.n == 4
    assert total.dim == 4
    assert total.is_closed()
    assert is_commutative(total)
    with pytest.raises(ShapeError):
        direct_sum(a, diagonal_algebra(2, 3))


def test_elements_and_combination() -> None:
    alg = polynomial_algebra(_jordan(2, 3))
    elements = list(alg.elements())
    assert len(elements) == 9
    assert len(set(elements)) == 9
    assert all(alg.contains(e) for e in elements)
    with pytest.raises(ShapeError):
        alg.combination([1])
    assert not alg.contains(Matrix.identity(3, 3))


def test_minimal_polynomial() -> None:
    assert minimal_polynomial(_jordan(3, 2)) == [0, 0, 0, 1]
    assert minimal_polynomial(Matrix.identity(3, 5)) == [4, 1]
    # x^2 + x + 1 over F_2
    assert minimal_polynomial(Matrix([[0, 1], [1, 1]], 2)) == [1, 1, 1]
    with pytest.raises(ShapeError):
        minimal_polynomial(Matrix([[1, 0]], 2))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_polynomial_algebra_dimension(p: int, rng: np.random.Generator) -> None:
    # |F_p[M]| = p^deg(minpoly), counted over every polynomial of degree < n
    for _ in range(15):
        n = int(rng.integers(1, 7))
        m = Matrix.random(n, n, p, rng)
        coefficients = minimal_polynomial(m)
        degree = len(coefficients) - 1
        assert generate_algebra([m], include_identity=True).dim == degree
        assert polynomial_algebra(m).dim == degree

        powers = [np.eye(n, dtype=np.int64)]
        for _ in range(n):
            powers.append((powers[-1] @ m.data) % p)
        annihilated = sum(c * powers[i] for i, c in enumerate(coefficients)) % p
        assert not annihilated.any()

        grid = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
        flat = np.array([q.ravel() for q in powers[:n]])
        values = (grid @ flat) % p
        assert len(np.unique(values, axis=0)) == p**degree
