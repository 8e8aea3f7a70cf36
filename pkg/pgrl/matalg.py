"""
Subalgebras of n x n matrices over F_p.

A MatAlgebra is a multiplication-closed subspace of M_n(F_p). It is stored as the
canonical subspace of F_p^(n*n) spanned by the row-major vectorizations of its
basis matrices, so two algebras are equal iff their canonical bases are.
"""

import itertools
from typing import Iterator, Optional, Sequence

import numpy as np

from .core import InternalInvariantViolation, NotClosedInput, ShapeError, logger
from .exactla import Matrix, Subspace, _mod_matmul, _nullspace, check_prime


def _batched_products(left: np.ndarray, right: np.ndarray, p: int) -> np.ndarray:
    # left (a, n, n), right (b, n, n) -> vectorized products (a * b, n * n),
    # ordered as left[0] right[0], left[0] right[1], ...
    n = left.shape[-1] if left.size else right.shape[-1]
    if left.shape[0] == 0 or right.shape[0] == 0:
        return np.zeros((0, n * n), dtype=np.int64)
    if n * (p - 1) ** 2 < 2**63:
        prods = np.einsum("aij,bjk->abik", left, right) % p
    else:
        prods = np.einsum(
            "aij,bjk->abik", left.astype(object), right.astype(object)
        ) % p
    return np.asarray(prods, dtype=np.int64).reshape(-1, n * n)


class MatAlgebra:
    """
    A multiplication-closed subspace of n x n matrices over F_p.

    Args:
        space (Subspace): The span, as a subspace of F_p^(n*n).
        n (int): The matrix size.
        check_closed (bool, optional): Verify closure under multiplication.
          Defaults to True.

    Raises:
        NotClosedInput: If check_closed is set and the span is not closed.
    """

    __slots__ = ("_space", "_n")

    def __init__(self, space: Subspace, n: int, check_closed: bool = True) -> None:
        if n < 1 or space.ambient_dim != n * n:
            raise ShapeError(
                f"a subspace of F_p^{space.ambient_dim} is not a space of {n}x{n} matrices"
            )
        self._space = space
        self._n = n
        if check_closed and not self.is_closed():
            raise NotClosedInput(
                f"the {space.dim}-dimensional span of {n}x{n} matrices "
                f"is not closed under multiplication"
            )

    @classmethod
    def span(
        cls, matrices: Sequence[Matrix], n: Optional[int] = None, p: Optional[int] = None
    ) -> "MatAlgebra":
        """
        The algebra spanned by matrices which are required to span a closed space.
        """
        n, p = _common_shape(matrices, n, p)
        vectors = [m.vectorize() for m in matrices]
        return cls(Subspace(vectors or None, n * n, p), n)

    @classmethod
    def zero(cls, n: int, p: int) -> "MatAlgebra":
        return cls(Subspace.zero(n * n, p), n, check_closed=False)

    @property
    def n(self) -> int:
        return self._n

    @property
    def p(self) -> int:
        return self._space.p

    @property
    def dim(self) -> int:
        return self._space.dim

    @property
    def space(self) -> Subspace:
        return self._space

    @property
    def basis_array(self) -> np.ndarray:
        """
        The canonical basis as an array of shape (dim, n, n).
        """
        return self._space.basis.reshape(-1, self._n, self._n)

    @property
    def basis(self) -> list[Matrix]:
        return [Matrix(b, self.p) for b in self.basis_array]

    @property
    def unital(self) -> bool:
        """
        Whether the identity matrix lies in the span.
        """
        return self._space.contains(np.eye(self._n, dtype=np.int64).reshape(-1))

    def is_zero(self) -> bool:
        return self.dim == 0

    def contains(self, m: Matrix) -> bool:
        if m.shape != (self._n, self._n) or m.modulus != self.p:
            return False
        return self._space.contains(m.vectorize())

    def products(self) -> np.ndarray:
        """
        Vectorized products of all ordered pairs of basis elements, (dim^2, n^2).
        """
        b = self.basis_array
        return _batched_products(b, b, self.p)

    def is_closed(self) -> bool:
        if self.dim == 0:
            return True
        stacked = Subspace(
            np.vstack([self._space.basis, self.products()]), self._n**2, self.p
        )
        return stacked == self._space

    def combination(self, coeffs: Sequence[int]) -> Matrix:
        """
        The element sum(coeffs[t] * basis[t]).
        """
        c = np.array(coeffs, dtype=np.int64)
        if c.shape != (self.dim,):
            raise ShapeError(f"{len(c)} coefficients for a {self.dim}-dimensional algebra")
        if self.dim == 0:
            return Matrix.zeros(self._n, self._n, self.p)
        vec = _mod_matmul(c, self._space.basis, self.p)
        return Matrix.from_vector(vec, self._n, self._n, self.p)

    def elements(self) -> Iterator[Matrix]:
        """
        Iterate over the p^dim elements of the algebra (deterministic order).
        """
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            yield self.combination(coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatAlgebra):
            return NotImplemented
        return self._n == other._n and self._space == other._space

    def __hash__(self) -> int:
        return hash((self._n, self._space))

    def __repr__(self) -> str:
        return f"MatAlgebra(n={self._n}, p={self.p}, dim={self.dim})"


def _common_shape(
    matrices: Sequence[Matrix], n: Optional[int], p: Optional[int]
) -> tuple[int, int]:
    if not matrices:
        if n is None or p is None:
            raise ShapeError("without matrices, both n and p must be given")
        return n, check_prime(p)
    first = matrices[0]
    for m in matrices:
        if not m.is_square:
            raise ShapeError(f"generator of shape {m.shape} is not square")
        if m.shape != first.shape or m.modulus != first.modulus:
            raise ShapeError(
                f"generators of sizes/moduli {first.shape}/{first.modulus} "
                f"and {m.shape}/{m.modulus}"
            )
    if (n is not None and n != first.rows) or (p is not None and p != first.modulus):
        raise ShapeError(f"generators are {first.rows}x{first.rows} over Z/{first.modulus}")
    return first.rows, check_prime(first.modulus)


def generate_algebra(
    gens: Sequence[Matrix],
    include_identity: bool = False,
    n: Optional[int] = None,
    p: Optional[int] = None,
) -> MatAlgebra:
    """
    The smallest multiplication-closed subspace containing the generators (and the
    identity if include_identity is set), computed by appending all pairwise
    products of the current basis and re-canonicalizing, until a fixpoint.

    Args:
        gens (Sequence[Matrix]): Square matrices of equal size and prime modulus.
        include_identity (bool, optional): Adjoin the identity. Defaults to False.
        n (Optional[int]): Matrix size, required when gens is empty.
        p (Optional[int]): The prime, required when gens is empty.

    Returns:
        MatAlgebra: The generated algebra.

    Raises:
        ShapeError: If the generators have mixed sizes or moduli.
    """
    n, p = _common_shape(gens, n, p)
    vectors = [g.vectorize() for g in gens]
    if include_identity:
        vectors.append(np.eye(n, dtype=np.int64).reshape(-1))
    space = Subspace(vectors or None, n * n, p)
    rounds = 0
    while True:
        rounds += 1
        basis = space.basis.reshape(-1, n, n)
        grown = Subspace(
            np.vstack([space.basis, _batched_products(basis, basis, p)]), n * n, p
        )
        logger.debug(f"closure round {rounds}: dimension {space.dim} -> {grown.dim}")
        if grown == space:
            break
        space = grown
    return MatAlgebra(space, n, check_closed=False)


def is_commutative(alg: MatAlgebra) -> bool:
    d = alg.dim
    if d == 0:
        return True
    prods = alg.products().reshape(d, d, -1)
    return bool(np.array_equal(prods, prods.transpose(1, 0, 2)))


def algebra_square(alg: MatAlgebra) -> MatAlgebra:
    """
    The span of all products of pairs of elements. For a closed span this span
    is itself closed; a failure of closure signals upstream corruption.

    Raises:
        InternalInvariantViolation: If the product span is not closed.
    """
    space = Subspace(alg.products() if alg.dim else None, alg.n**2, alg.p)
    try:
        return MatAlgebra(space, alg.n)
    except NotClosedInput as e:
        raise InternalInvariantViolation(f"product span not closed: {e}")


def common_kernel(alg: MatAlgebra) -> Subspace:
    """
    ker(A) = {v : a(v) = 0 for every a in A}, the kernel of the stacked basis.
    """
    n, p = alg.n, alg.p
    if alg.dim == 0:
        return Subspace.full(n, p)
    stacked = alg.basis_array.reshape(-1, n)
    return Subspace(_nullspace(stacked, p), n, p)


def image_of_vector(alg: MatAlgebra, x: np.ndarray) -> Subspace:
    """
    A(x) = {a(x) : a in A}, spanned by the images of x under the basis.
    """
    n, p = alg.n, alg.p
    v = np.array(x, dtype=np.int64) % p
    if v.shape != (n,):
        raise ShapeError(f"vector of shape {v.shape} for {n}x{n} matrices")
    if alg.dim == 0:
        return Subspace.zero(n, p)
    return Subspace(_mod_matmul(alg.basis_array, v, p), n, p)


def is_ideal(sub: MatAlgebra, alg: MatAlgebra) -> bool:
    """
    Whether sub is a (two-sided) ideal of alg: sub lies in alg and absorbs
    products with alg on both sides.
    """
    if sub.n != alg.n or sub.p != alg.p:
        raise ShapeError(f"{sub} and {alg} do not act on the same space")
    if not sub.space.is_subspace_of(alg.space):
        return False
    if sub.dim == 0:
        return True
    a, b, p = alg.basis_array, sub.basis_array, alg.p
    absorbed = np.vstack(
        [sub.space.basis, _batched_products(a, b, p), _batched_products(b, a, p)]
    )
    return Subspace(absorbed, alg.n**2, p) == sub.space


def diagonal_algebra(n: int, p: int) -> MatAlgebra:
    return MatAlgebra.span([Matrix.unit(i, i, n, p) for i in range(n)])


def full_matrix_algebra(n: int, p: int) -> MatAlgebra:
    return MatAlgebra(Subspace.full(n * n, p), n, check_closed=False)


def direct_sum(a: MatAlgebra, b: MatAlgebra) -> MatAlgebra:
    """
    The block diagonal algebra {diag(x, y) : x in a, y in b}.
    """
    if a.p != b.p:
        raise ShapeError(f"direct sum of algebras over F_{a.p} and F_{b.p}")
    n = a.n + b.n
    blocks = []
    for x in a.basis_array:
        m = np.zeros((n, n), dtype=np.int64)
        m[: a.n, : a.n] = x
        blocks.append(m.reshape(-1))
    for y in b.basis_array:
        m = np.zeros((n, n), dtype=np.int64)
        m[a.n :, a.n :] = y
        blocks.append(m.reshape(-1))
    return MatAlgebra(Subspace(blocks or None, n * n, a.p), n, check_closed=False)


def polynomial_algebra(m: Matrix) -> MatAlgebra:
    """
    F_p[m], the unital algebra generated by a single matrix (always commutative).
    """
    return generate_algebra([m], include_identity=True)


def minimal_polynomial(m: Matrix) -> list[int]:
    """
    Coefficients c_0, ..., c_d (c_d = 1) of the minimal polynomial of m,
    found as the first linear dependency among 1, m, m^2, ...
    """
    if not m.is_square:
        raise ShapeError(f"minimal polynomial of a non square {m.shape} matrix")
    p = check_prime(m.modulus)
    powers = [Matrix.identity(m.rows, p).vectorize()]
    current = Matrix.identity(m.rows, p)
    while True:
        current = current @ m
        powers.append(current.vectorize())
        # lower powers are independent, so the relation is unique and its
        # free coordinate (the newest power) is already 1
        relations = _nullspace(np.array(powers).T, p)
        if relations.shape[0]:
            return [int(c) for c in relations[0]]
