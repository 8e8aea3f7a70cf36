"""
Exact linear algebra over prime fields F_p.

This module provides immutable matrices, reduced row echelon forms, canonical
subspaces (always stored in reduced row echelon form, so that equal subspaces
have identical bases) and the subspace lattice operations used by the other
modules: sums, intersections, kernels, codimensions and preimages.

Rows over F_2 are bit-packed into 64 bit words and eliminated with word-parallel
xor; rows over other primes are int64 vectors reduced modulo p.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .core import (DimensionTooLarge, ModulusNotPrime, NotASubspace,
                   NotInvertible, ShapeError, is_prime, logger)

MAX_PRIME = 2**31 - 1
PACKED_WORD = 64
MAX_DIM = 512
"""
Maximum number of rows or columns of a Matrix.
"""
PACKED_MAX_DIM = 64
"""
Maximum number of rows or columns of a Matrix over F_2.
"""
MAX_WIDTH = 4096
"""
Maximum ambient dimension of a Subspace (vectorized n x n matrices, n <= 64).
"""

ArrayLike = Union[np.ndarray, Sequence[Sequence[int]], Sequence[np.ndarray]]


@dataclass(frozen=True)
class PrimeModulus:
    """
    A prime p, 2 <= p <= 2^31 - 1, checked at construction.
    """

    p: int

    def __post_init__(self) -> None:
        p = self.p
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
            raise ModulusNotPrime(f"modulus {p!r} is not an integer")
        if not 2 <= int(p) <= MAX_PRIME or not is_prime(int(p)):
            raise ModulusNotPrime(f"modulus {p} is not a prime in [2, {MAX_PRIME}]")

    def __int__(self) -> int:
        return int(self.p)


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """
    Return p if it is a supported prime, else raise ModulusNotPrime.
    """
    return int(PrimeModulus(int(p)))


def _mod_matmul(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    # products of reduced entries are summed over the inner dimension;
    # switch to python integers when int64 could overflow
    inner = a.shape[-1]
    if inner * (modulus - 1) ** 2 < 2**63:
        return (a @ b) % modulus
    return ((a.astype(object) @ b.astype(object)) % modulus).astype(np.int64)


class Matrix:
    """
    An immutable rows x cols matrix over Z/modulus.

    Entries are stored reduced, as a read-only int64 numpy array. The modulus is
    usually a prime; prime powers are allowed for the nil-ring construction, but
    echelon forms and inverses require a prime.

    Args:
        data: Anything numpy can turn into a 2 dimensional integer array.
        modulus (int): The modulus of the entries (>= 2).
    """

    __slots__ = ("_data", "_modulus")

    def __init__(self, data: ArrayLike, modulus: int) -> None:
        modulus = int(modulus)
        if modulus < 2:
            raise ShapeError(f"modulus should be at least 2, got {modulus}")
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ShapeError(
                f"a matrix needs positive rows and columns, got shape {arr.shape}"
            )
        limit = PACKED_MAX_DIM if modulus == 2 else MAX_DIM
        if max(arr.shape) > limit:
            raise DimensionTooLarge(
                f"matrix of shape {arr.shape} exceeds the supported size {limit}"
            )
        arr %= modulus
        arr.setflags(write=False)
        self._data = arr
        self._modulus = modulus

    @classmethod
    def _wrap(cls, arr: np.ndarray, modulus: int) -> "Matrix":
        # arr is already reduced and owned by the new matrix
        m = cls.__new__(cls)
        arr.setflags(write=False)
        m._data = arr
        m._modulus = modulus
        return m

    @classmethod
    def identity(cls, n: int, modulus: int) -> "Matrix":
        return cls._wrap(np.eye(n, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @classmethod
    def unit(cls, i: int, j: int, n: int, modulus: int) -> "Matrix":
        """
        The matrix unit E_ij (0-indexed) of size n x n.
        """
        arr = np.zeros((n, n), dtype=np.int64)
        arr[i, j] = 1
        return cls._wrap(arr, modulus)

    @classmethod
    def diagonal(cls, entries: Sequence[int], modulus: int) -> "Matrix":
        return cls(np.diag(np.array(entries, dtype=np.int64)), modulus)

    @classmethod
    def from_vector(cls, vector: np.ndarray, rows: int, cols: int, modulus: int) -> "Matrix":
        """
        Inverse of vectorize: row-major reshaping of a length rows*cols vector.
        """
        arr = np.array(vector, dtype=np.int64).reshape(rows, cols) % modulus
        return cls._wrap(arr, modulus)

    @classmethod
    def random(
        cls, rows: int, cols: int, modulus: int, rng: np.random.Generator
    ) -> "Matrix":
        return cls._wrap(
            rng.integers(0, modulus, size=(rows, cols), dtype=np.int64), modulus
        )

    @property
    def modulus(self) -> int:
        return self._modulus

    @property
    def data(self) -> np.ndarray:
        """
        The (read-only) entries.
        """
        return self._data

    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def key(self) -> bytes:
        """
        Bytes identifying the matrix among matrices of the same shape and modulus.
        """
        return self._data.tobytes()

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self._data]

    def vectorize(self) -> np.ndarray:
        """
        Row-major vector of length rows*cols.
        """
        return self._data.reshape(-1).copy()

    def is_zero(self) -> bool:
        return not self._data.any()

    def is_identity(self) -> bool:
        return self.is_square and np.array_equal(
            self._data, np.eye(self.rows, dtype=np.int64)
        )

    def transpose(self) -> "Matrix":
        return Matrix._wrap(self._data.T.copy(), self._modulus)

    def _same(self, other: "Matrix", op: str) -> None:
        if self._modulus != other._modulus:
            raise ShapeError(
                f"{op}: moduli differ ({self._modulus} and {other._modulus})"
            )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same(other, "product")
        if self.cols != other.rows:
            raise ShapeError(f"product: shapes {self.shape} and {other.shape}")
        return Matrix._wrap(
            _mod_matmul(self._data, other._data, self._modulus), self._modulus
        )

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """
        Return the image m.v of a column vector v.
        """
        v = np.asarray(vector, dtype=np.int64)
        if v.shape != (self.cols,):
            raise ShapeError(f"cannot apply a {self.shape} matrix to shape {v.shape}")
        return _mod_matmul(self._data, v % self._modulus, self._modulus)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same(other, "sum")
        if self.shape != other.shape:
            raise ShapeError(f"sum: shapes {self.shape} and {other.shape}")
        return Matrix._wrap((self._data + other._data) % self._modulus, self._modulus)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same(other, "difference")
        if self.shape != other.shape:
            raise ShapeError(f"difference: shapes {self.shape} and {other.shape}")
        return Matrix._wrap((self._data - other._data) % self._modulus, self._modulus)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap((-self._data) % self._modulus, self._modulus)

    def scale(self, c: int) -> "Matrix":
        return Matrix._wrap(
            (self._data * (int(c) % self._modulus)) % self._modulus, self._modulus
        )

    def __pow__(self, e: int) -> "Matrix":
        if not self.is_square:
            raise ShapeError(f"power of a non square {self.shape} matrix")
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = Matrix.identity(self.rows, self._modulus)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def is_invertible(self) -> bool:
        return self.is_square and rank(self) == self.rows

    def inverse(self) -> "Matrix":
        """
        Inverse over F_p, obtained by reducing [m | 1].

        Raises:
            NotInvertible: If the matrix is singular.
        """
        if not self.is_square:
            raise ShapeError(f"inverse of a non square {self.shape} matrix")
        p = _prime_of(self)
        n = self.rows
        augmented = np.hstack([self._data, np.eye(n, dtype=np.int64)])
        red, pivots = _rref_array(augmented, p)
        if pivots[:n] != list(range(n)):
            raise NotInvertible(f"matrix is singular over F_{p}")
        return Matrix._wrap(red[:, n:].copy(), p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self._modulus == other._modulus
            and self.shape == other.shape
            and bool(np.array_equal(self._data, other._data))
        )

    def __hash__(self) -> int:
        return hash((self._modulus, self.shape, self.key))

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()}, modulus={self._modulus})"


def _prime_of(m: Matrix) -> int:
    try:
        return check_prime(m.modulus)
    except ModulusNotPrime:
        raise ModulusNotPrime(f"modulus {m.modulus} of a {m.shape} matrix is not prime")


def _rref_gf2(arr: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # bit c of word w holds column 64 * w + c
    rows, cols = arr.shape
    if rows == 0 or cols == 0:
        return arr.copy(), []
    nwords = -(-cols // PACKED_WORD)
    bits = np.zeros((rows, nwords * PACKED_WORD), dtype=np.uint8)
    bits[:, :cols] = arr & 1
    words = np.packbits(bits, axis=1, bitorder="little").view("<u8")
    rank_ = 0
    pivots: list[int] = []
    for c in range(cols):
        if rank_ == rows:
            break
        w, b = divmod(c, PACKED_WORD)
        hits = ((words[:, w] >> np.uint64(b)) & np.uint64(1)).astype(bool)
        candidates = np.flatnonzero(hits[rank_:])
        if candidates.size == 0:
            continue
        r = rank_ + int(candidates[0])
        if r != rank_:
            words[[rank_, r]] = words[[r, rank_]]
            hits[[rank_, r]] = hits[[r, rank_]]
        hits[rank_] = False
        words[hits] ^= words[rank_]
        pivots.append(c)
        rank_ += 1
    unpacked = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return unpacked[:, :cols].astype(np.int64), pivots


def _rref_modp(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(arr, dtype=np.int64) % p
    rows, cols = a.shape
    rank_ = 0
    pivots: list[int] = []
    for c in range(cols):
        if rank_ == rows:
            break
        candidates = np.flatnonzero(a[rank_:, c])
        if candidates.size == 0:
            continue
        r = rank_ + int(candidates[0])
        if r != rank_:
            a[[rank_, r]] = a[[r, rank_]]
        inv = pow(int(a[rank_, c]), -1, p)
        a[rank_] = (a[rank_] * inv) % p
        factors = a[:, c].copy()
        factors[rank_] = 0
        if factors.any():
            a = (a - np.outer(factors, a[rank_]) % p) % p
        pivots.append(c)
        rank_ += 1
    return a, pivots


def _rref_array(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    # full-shape reduced row echelon form; zero rows at the bottom
    if p == 2:
        return _rref_gf2(np.asarray(arr, dtype=np.int64) % 2)
    return _rref_modp(arr, p)


def _nullspace(arr: np.ndarray, p: int) -> np.ndarray:
    # basis (one row per free column) of {v : arr.v = 0}
    cols = arr.shape[1]
    red, pivots = _rref_array(arr, p)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for i, c in enumerate(pivots):
            basis[t, c] = (-red[i, f]) % p
    return basis


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    """
    Reduced row echelon form of a matrix over F_p.

    Args:
        m (Matrix): A matrix with prime modulus (left unmodified).

    Returns:
        tuple[Matrix, int, list[int]]: The unique reduced row echelon form (same
        shape as m, zero rows last), the rank and the pivot columns.

    Raises:
        ModulusNotPrime: If the modulus of m is composite.
    """
    p = _prime_of(m)
    red, pivots = _rref_array(m.data, p)
    return Matrix._wrap(red, p), len(pivots), pivots


def rank(m: Matrix) -> int:
    return len(_rref_array(m.data, _prime_of(m))[1])


class Subspace:
    """
    A subspace of F_p^n, stored canonically: its basis is the list of nonzero
    rows of a reduced row echelon form. Two equal subspaces therefore have
    identical stored bases, and equality is structural.

    Args:
        vectors: Spanning vectors (any number, possibly dependent or zero);
          None or an empty sequence gives the zero subspace.
        ambient_dim (int): n.
        p (int): The prime.
    """

    __slots__ = ("_basis", "_pivots", "_p", "_n")

    def __init__(self, vectors: Optional[ArrayLike], ambient_dim: int, p: int) -> None:
        p = check_prime(p)
        if ambient_dim < 0 or ambient_dim > MAX_WIDTH:
            raise DimensionTooLarge(
                f"ambient dimension {ambient_dim} outside [0, {MAX_WIDTH}]"
            )
        arr = np.zeros((0, ambient_dim), dtype=np.int64)
        if vectors is not None:
            given = np.array(vectors, dtype=np.int64)
            if given.size != 0:
                if given.ndim == 1:
                    given = given.reshape(1, -1)
                if given.ndim != 2 or given.shape[1] != ambient_dim:
                    raise ShapeError(
                        f"vectors of shape {given.shape} do not live in F_{p}^{ambient_dim}"
                    )
                arr = given % p
        red, pivots = _rref_array(arr, p)
        basis = red[: len(pivots)].copy()
        basis.setflags(write=False)
        self._basis = basis
        self._pivots = tuple(pivots)
        self._p = p
        self._n = ambient_dim

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(None, n, p)

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(np.eye(n, dtype=np.int64), n, p)

    @property
    def p(self) -> int:
        return self._p

    @property
    def ambient_dim(self) -> int:
        return self._n

    @property
    def dim(self) -> int:
        return len(self._pivots)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    @property
    def key(self) -> bytes:
        return self._basis.tobytes()

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self._n

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        """
        Residue of a vector modulo the subspace (zero iff the vector belongs to it).
        """
        v = np.array(vector, dtype=np.int64) % self._p
        if v.shape != (self._n,):
            raise ShapeError(
                f"vector of shape {v.shape} does not live in F_{self._p}^{self._n}"
            )
        for row, c in zip(self._basis, self._pivots):
            if v[c]:
                v = (v - v[c] * row) % self._p
        return v

    def contains(self, vector: np.ndarray) -> bool:
        return not self.reduce(vector).any()

    def is_subspace_of(self, other: "Subspace") -> bool:
        _same_space(self, other)
        return all(other.contains(row) for row in self._basis)

    def annihilator(self) -> "Subspace":
        """
        {y : y.w = 0 for all w in the subspace} (standard dot product).
        """
        if self.dim == 0:
            return Subspace.full(self._n, self._p)
        return Subspace(_nullspace(self._basis, self._p), self._n, self._p)

    def elements(self) -> Iterator[np.ndarray]:
        """
        Iterate over the p^dim vectors of the subspace (deterministic order).
        """
        for coeffs in itertools.product(range(self._p), repeat=self.dim):
            if self.dim == 0:
                yield np.zeros(self._n, dtype=np.int64)
            else:
                yield _mod_matmul(np.array(coeffs, dtype=np.int64), self._basis, self._p)

    def as_matrix(self) -> Matrix:
        if self.dim == 0:
            raise ShapeError("the zero subspace has no basis matrix")
        return Matrix(self._basis, self._p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self._p == other._p
            and self._n == other._n
            and self._pivots == other._pivots
            and bool(np.array_equal(self._basis, other._basis))
        )

    def __hash__(self) -> int:
        return hash((self._p, self._n, self._pivots, self.key))

    def __repr__(self) -> str:
        rows = [[int(x) for x in row] for row in self._basis]
        return f"Subspace({rows}, ambient_dim={self._n}, p={self._p})"


def _same_space(a: Subspace, b: Subspace) -> None:
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise ShapeError(
            f"subspaces of F_{a.p}^{a.ambient_dim} and F_{b.p}^{b.ambient_dim}"
        )


def kernel(m: Matrix) -> Subspace:
    """
    {v : m.v = 0}, canonical; its dimension is cols - rank(m).
    """
    p = _prime_of(m)
    return Subspace(_nullspace(m.data, p), m.cols, p)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_space(a, b)
    return Subspace(np.vstack([a.basis, b.basis]), a.ambient_dim, a.p)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """
    Intersection by the Zassenhaus algorithm: reduce [[A, A], [B, 0]]; the rows
    whose left half vanishes carry a basis of the intersection in their right half.
    """
    _same_space(a, b)
    n, p = a.ambient_dim, a.p
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n, p)
    top = np.hstack([a.basis, a.basis])
    bottom = np.hstack([b.basis, np.zeros_like(b.basis)])
    red, pivots = _rref_array(np.vstack([top, bottom]), p)
    rows = [red[i, n:] for i, c in enumerate(pivots) if c >= n]
    return Subspace(np.array(rows) if rows else None, n, p)


def subspace_contains(a: Subspace, v: np.ndarray) -> bool:
    return a.contains(v)


def codim(inner: Subspace, outer: Subspace) -> int:
    """
    codim(inner, outer) = dim(outer) - dim(inner).

    Raises:
        NotASubspace: If inner is not contained in outer.
    """
    if not inner.is_subspace_of(outer):
        raise NotASubspace(
            f"a {inner.dim}-dimensional subspace is not contained in "
            f"the {outer.dim}-dimensional one"
        )
    return outer.dim - inner.dim


def preimage(m: Matrix, w: Subspace) -> Subspace:
    """
    {v : m.v in w}, computed as the kernel of (annihilator of w).m.

    Args:
        m (Matrix): A linear map F_p^cols -> F_p^rows.
        w (Subspace): A subspace of F_p^rows.

    Returns:
        Subspace: The preimage, a subspace of F_p^cols containing kernel(m).

    Raises:
        ShapeError: If w does not live in the codomain of m.
    """
    p = _prime_of(m)
    if w.ambient_dim != m.rows or w.p != p:
        raise ShapeError(
            f"preimage: map with codomain F_{p}^{m.rows}, "
            f"subspace of F_{w.p}^{w.ambient_dim}"
        )
    ann = w.annihilator()
    if ann.dim == 0:
        return Subspace.full(m.cols, p)
    constraints = _mod_matmul(ann.basis, m.data, p)
    return Subspace(_nullspace(constraints, p), m.cols, p)


def enumerate_subspaces(n: int, p: int, dim: Optional[int] = None) -> Iterator[Subspace]:
    """
    Iterate over all subspaces of F_p^n (or those of a given dimension), one per
    reduced row echelon form: pivot columns are chosen first, then every free
    entry to the right of a pivot and outside the pivot columns.
    """
    p = check_prime(p)
    dims = range(n + 1) if dim is None else [dim]
    for d in dims:
        for pivots in itertools.combinations(range(n), d):
            pivot_set = set(pivots)
            free = [
                (i, c)
                for i, pc in enumerate(pivots)
                for c in range(pc + 1, n)
                if c not in pivot_set
            ]
            for values in itertools.product(range(p), repeat=len(free)):
                basis = np.zeros((d, n), dtype=np.int64)
                for i, pc in enumerate(pivots):
                    basis[i, pc] = 1
                for (i, c), value in zip(free, values):
                    basis[i, c] = value
                yield Subspace(basis if d else None, n, p)
    logger.debug(f"enumerated subspaces of F_{p}^{n} (dim={dim})")


def _batch_pow(stack: np.ndarray, e: int, p: int) -> np.ndarray:
    # stack (N, n, n) -> every matrix raised to the same power e >= 0
    n = stack.shape[-1]
    result = np.broadcast_to(np.eye(n, dtype=np.int64), stack.shape).copy()
    base = stack.copy()
    while e:
        if e & 1:
            result = _mod_matmul(result, base, p)
        base = _mod_matmul(base, base, p)
        e >>= 1
    return result


@lru_cache(maxsize=16)
def _inverse_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


def _batch_invertible(stack: np.ndarray, p: int) -> np.ndarray:
    """
    Boolean mask of the invertible matrices in a stack (N, n, n) over F_p, by a
    Gaussian elimination run on all matrices at once.
    """
    work = np.array(stack, dtype=np.int64) % p
    count, n = work.shape[0], work.shape[-1]
    alive = np.ones(count, dtype=bool)
    rows = np.arange(count)
    table = _inverse_table(p) if p <= 2**16 else None
    for c in range(n):
        nonzero = work[:, c:, c] != 0
        has_pivot = nonzero.any(axis=1)
        alive &= has_pivot
        pivot = c + np.argmax(nonzero, axis=1)
        top = work[rows, c].copy()
        work[rows, c] = work[rows, pivot]
        work[rows, pivot] = top
        lead = work[:, c, c]
        if table is not None:
            inv = table[lead]
        else:
            inv = np.array(
                [pow(int(x), -1, p) if x else 0 for x in lead], dtype=np.int64
            )
        work[:, c] = (work[:, c] * inv[:, None]) % p
        factors = work[:, c + 1 :, c].copy()
        work[:, c + 1 :] = (
            work[:, c + 1 :] - factors[:, :, None] * work[:, c][:, None, :]
        ) % p
    return alive
