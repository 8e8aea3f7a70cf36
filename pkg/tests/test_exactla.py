import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgrl.core import (DimensionTooLarge, ModulusNotPrime, NotASubspace,
                       NotInvertible, ShapeError)
from pgrl.exactla import (Matrix, PrimeModulus, Subspace, _batch_invertible,
                          _rref_gf2, _rref_modp, codim, enumerate_subspaces,
                          kernel, preimage, rank, rref, subspace_contains,
                          subspace_intersect, subspace_sum)

primes = st.sampled_from([2, 3, 5])


def _random_matrix(seed: int, rows: int, cols: int, p: int) -> Matrix:
    return Matrix.random(rows, cols, p, np.random.default_rng(seed))


def _vectors(n: int, p: int):
    for coords in itertools.product(range(p), repeat=n):
        yield np.array(coords, dtype=np.int64)


@pytest.mark.parametrize("p", [2, 3, 5, 2**31 - 1])
def test_prime_modulus_accepts_primes(p: int) -> None:
    assert int(PrimeModulus(p)) == p


@pytest.mark.parametrize("p", [0, 1, 4, 9, 2**31 + 11, True])
def test_prime_modulus_rejects(p: int) -> None:
    with pytest.raises(ModulusNotPrime):
        PrimeModulus(p)


def test_matrix_entries_are_reduced() -> None:
    m = Matrix([[5, -1], [3, 7]], 3)
    assert m.tolist() == [[2, 2], [0, 1]]
    with pytest.raises(ValueError):
        m.data[0, 0] = 1


def test_matrix_shape_errors() -> None:
    with pytest.raises(ShapeError):
        Matrix([1, 2, 3], 3)
    with pytest.raises(ShapeError):
        Matrix([[1]], 1)
    with pytest.raises(DimensionTooLarge):
        Matrix(np.zeros((1, 513), dtype=np.int64), 3)
    # rows over F_2 are packed: at most 64 columns
    with pytest.raises(DimensionTooLarge):
        Matrix(np.zeros((65, 65), dtype=np.int64), 2)
    assert Matrix(np.zeros((64, 64), dtype=np.int64), 2).shape == (64, 64)
    assert Matrix(np.zeros((65, 65), dtype=np.int64), 3).shape == (65, 65)
    with pytest.raises(ShapeError):
        Matrix([[1, 0]], 2) @ Matrix([[1, 0]], 2)
    with pytest.raises(ShapeError):
        Matrix([[1]], 2) + Matrix([[1]], 3)


def test_rref_examples() -> None:
    red, r, pivots = rref(Matrix([[1, 1], [1, 1]], 2))
    assert red.tolist() == [[1, 1], [0, 0]]
    assert r == 1
    assert pivots == [0]

    red, r, pivots = rref(Matrix([[2, 1], [1, 2]], 3))
    assert red.tolist() == [[1, 2], [0, 0]]
    assert r == 1

    red, r, _ = rref(Matrix([[0, 2, 4], [1, 0, 3]], 5))
    assert red.tolist() == [[1, 0, 3], [0, 1, 2]]
    assert r == 2


def test_rref_needs_a_prime() -> None:
    with pytest.raises(ModulusNotPrime):
        rref(Matrix([[1, 2]], 4))


def test_packed_elimination_matches_generic(rng: np.random.Generator) -> None:
    for rows, cols in [(5, 3), (7, 64), (9, 65), (40, 130), (3, 200)]:
        arr = rng.integers(0, 2, size=(rows, cols), dtype=np.int64)
        packed, packed_pivots = _rref_gf2(arr)
        generic, generic_pivots = _rref_modp(arr, 2)
        assert packed_pivots == generic_pivots
        assert np.array_equal(packed, generic)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    p=primes,
    rows=st.integers(1, 8),
    cols=st.integers(1, 8),
)
def test_rank_nullity(seed: int, p: int, rows: int, cols: int) -> None:
    m = _random_matrix(seed, rows, cols, p)
    ker = kernel(m)
    assert rank(m) + ker.dim == cols
    for v in ker.basis:
        assert not m.apply(v).any()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=primes, n=st.integers(1, 6))
def test_inverse(seed: int, p: int, n: int) -> None:
    m = _random_matrix(seed, n, n, p)
    if m.is_invertible():
        assert (m @ m.inverse()).is_identity()
        assert (m.inverse() @ m).is_identity()
        assert (m ** -1) == m.inverse()
    else:
        with pytest.raises(NotInvertible):
            m.inverse()


def test_batch_invertibility_matches_rank(rng: np.random.Generator) -> None:
    for p in (2, 3, 5):
        stack = rng.integers(0, p, size=(200, 3, 3), dtype=np.int64)
        mask = _batch_invertible(stack, p)
        expected = [Matrix(m, p).is_invertible() for m in stack]
        assert mask.tolist() == expected


def test_power_and_vectorize() -> None:
    m = Matrix([[1, 1], [0, 1]], 5)
    assert (m**5).is_identity()
    assert (m**3).tolist() == [[1, 3], [0, 1]]
    assert Matrix.from_vector(m.vectorize(), 2, 2, 5) == m


def test_subspace_is_canonical() -> None:
    a = Subspace([[1, 1, 0], [0, 1, 1]], 3, 2)
    b = Subspace([[1, 0, 1], [0, 1, 1], [1, 1, 0]], 3, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert a.basis.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert a.pivots == (0, 1)
    assert Subspace(None, 3, 2).is_zero()
    assert Subspace([], 3, 2) == Subspace.zero(3, 2)


def test_subspace_shape_errors() -> None:
    with pytest.raises(ShapeError):
        Subspace([[1, 0]], 3, 2)
    with pytest.raises(DimensionTooLarge):
        Subspace(None, 5000, 2)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    p=st.sampled_from([2, 3]),
    n=st.integers(1, 4),
    da=st.integers(0, 4),
    db=st.integers(0, 4),
)
def test_sum_and_intersection(seed: int, p: int, n: int, da: int, db: int) -> None:
    rng = np.random.default_rng(seed)
    a = Subspace(rng.integers(0, p, size=(da, n)) if da else None, n, p)
    b = Subspace(rng.integers(0, p, size=(db, n)) if db else None, n, p)
    total = subspace_sum(a, b)
    meet = subspace_intersect(a, b)
    assert total.dim + meet.dim == a.dim + b.dim
    assert meet.is_subspace_of(a) and meet.is_subspace_of(b)
    assert a.is_subspace_of(total) and b.is_subspace_of(total)
    for v in _vectors(n, p):
        assert subspace_contains(meet, v) == (a.contains(v) and b.contains(v))


def test_modular_law(rng: np.random.Generator) -> None:
    # A <= C implies A + (B & C) = (A + B) & C
    p, n = 3, 4
    for _ in range(30):
        c = Subspace(rng.integers(0, p, size=(3, n)), n, p)
        a = Subspace(c.basis[:1], n, p)
        b = Subspace(rng.integers(0, p, size=(2, n)), n, p)
        left = subspace_sum(a, subspace_intersect(b, c))
        right = subspace_intersect(subspace_sum(a, b), c)
        assert left == right


def test_codim() -> None:
    outer = Subspace.full(3, 2)
    inner = Subspace([[1, 1, 0]], 3, 2)
    assert codim(inner, outer) == 2
    with pytest.raises(NotASubspace):
        codim(outer, inner)
    with pytest.raises(ShapeError):
        codim(inner, Subspace.full(4, 2))


def test_preimage(rng: np.random.Generator) -> None:
    p = 3
    for _ in range(10):
        m = Matrix.random(3, 3, p, rng)
        w = Subspace(rng.integers(0, p, size=(1, 3)), 3, p)
        pre = preimage(m, w)
        assert kernel(m).is_subspace_of(pre)
        for v in _vectors(3, p):
            assert pre.contains(v) == w.contains(m.apply(v))


def test_annihilator_and_reduce() -> None:
    w = Subspace([[1, 0, 1, 0], [0, 1, 1, 1]], 4, 2)
    ann = w.annihilator()
    assert ann.dim == 2
    for y in ann.basis:
        assert not (w.basis @ y % 2).any()
    assert not w.reduce(np.array([1, 1, 0, 1])).any()
    assert w.reduce(np.array([0, 0, 1, 0])).any()
    assert len(list(w.elements())) == 4


@pytest.mark.parametrize(
    "n, p, dim, count",
    [(3, 2, None, 16), (2, 3, None, 6), (4, 2, 2, 35), (3, 3, 1, 13), (4, 2, 0, 1)],
)
def test_enumerate_subspaces(n: int, p: int, dim, count: int) -> None:
    spaces = list(enumerate_subspaces(n, p, dim))
    assert len(spaces) == count
    assert len(set(spaces)) == count
    if dim is not None:
        assert all(s.dim == dim for s in spaces)
