"""
Finite matrix groups over F_p, enumerated by breadth-first closure.

FiniteMatrixGroup is the group engine shared by the abelian machinery of this
module (Omega, Mho, O_p, invariant factor types, the index of Omega_1(O_p(A)))
and by the builders of the verifier module (Frattini subgroups, centers,
centralizers, generator ranks). Groups are desk-scale: every enumeration is
bounded by the enumeration cap (Settings.max_enum()).
"""

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np
import sympy

from .core import (CapExceeded, Check, InternalInvariantViolation, NonAbelian,
                   NonCommutativeInput, NotAPGroup, NotInvertible, Settings,
                   ShapeError, check, logger)
from .exactla import (Matrix, _batch_invertible, _batch_pow, _mod_matmul,
                      check_prime)
from .matalg import MatAlgebra, generate_algebra, is_commutative

MatrixLike = Union[Matrix, np.ndarray]


def _as_array(m: MatrixLike) -> np.ndarray:
    data = m.data if isinstance(m, Matrix) else m
    return np.ascontiguousarray(data, dtype=np.int64)


def _exact_log(value: int, base: int) -> int:
    e = 0
    while value > 1 and value % base == 0:
        value //= base
        e += 1
    if value != 1:
        raise InternalInvariantViolation(f"{value * base**e} is not a power of {base}")
    return e


def _is_power_of(values: np.ndarray, q: int) -> np.ndarray:
    rest = values.copy()
    while True:
        divisible = (rest % q == 0) & (rest > 1)
        if not divisible.any():
            return rest == 1
        rest[divisible] //= q


class _Closure:
    """
    Incremental closure of invertible n x n matrices under multiplication.

    Elements are kept in discovery order together with a dict from their bytes
    to their index; extending by a new generator only multiplies what is needed.
    """

    def __init__(
        self, n: int, p: int, cap: int, on_grow: Optional[Callable[[int], None]] = None
    ) -> None:
        identity = np.eye(n, dtype=np.int64)
        self.n = n
        self.p = p
        self.cap = cap
        self.rows: list[np.ndarray] = [identity]
        self.index: dict[bytes, int] = {identity.tobytes(): 0}
        self.gens: list[np.ndarray] = []
        self._on_grow = on_grow

    def __contains__(self, m: np.ndarray) -> bool:
        return m.tobytes() in self.index

    def __len__(self) -> int:
        return len(self.rows)

    def _absorb(self, candidates: np.ndarray) -> list[np.ndarray]:
        fresh = []
        for row in candidates:
            key = row.tobytes()
            if key in self.index:
                continue
            if len(self.rows) >= self.cap:
                raise CapExceeded(
                    f"group of {self.n}x{self.n} matrices over F_{self.p} "
                    f"has more than {self.cap} elements"
                )
            self.index[key] = len(self.rows)
            self.rows.append(row)
            fresh.append(row)
        if self._on_grow is not None:
            self._on_grow(len(self.rows))
        return fresh

    def extend(self, g: np.ndarray) -> bool:
        """
        Add a generator; returns False if it already belonged to the closure.
        """
        if g in self:
            return False
        self.gens.append(g)
        frontier = self._absorb(_mod_matmul(np.array(self.rows), g, self.p))
        while frontier:
            stack = np.array(frontier)
            frontier = []
            for h in self.gens:
                frontier.extend(self._absorb(_mod_matmul(stack, h, self.p)))
        return True


class FiniteMatrixGroup:
    """
    The subgroup of GL(n, p) generated by a list of invertible matrices.

    The elements are enumerated on first use, once, under a lock; afterwards the
    group is immutable. The attribute enumerated counts the elements found so
    far (read by the progress display).

    Args:
        generators (Sequence[Matrix]): Invertible n x n matrices over F_p.
        n (Optional[int]): Matrix size, required when there are no generators.
        p (Optional[int]): The prime, required when there are no generators.
        cap (Optional[int]): Enumeration cap, defaults to Settings.max_enum().

    Raises:
        NotInvertible: If a generator is singular.
        ShapeError: If the generators have mixed sizes or moduli.
    """

    def __init__(
        self,
        generators: Sequence[MatrixLike],
        n: Optional[int] = None,
        p: Optional[int] = None,
        cap: Optional[int] = None,
    ) -> None:
        gens = []
        for g in generators:
            if isinstance(g, Matrix):
                if p is not None and g.modulus != p:
                    raise ShapeError(f"generator over Z/{g.modulus}, expected F_{p}")
                p = g.modulus
            gens.append(_as_array(g))
        if p is None:
            raise ShapeError("the prime p is required")
        self._p = check_prime(p)
        if n is None:
            if not gens:
                raise ShapeError("without generators, the size n is required")
            n = gens[0].shape[0]
        self._n = int(n)
        for g in gens:
            if g.shape != (self._n, self._n):
                raise ShapeError(f"generator of shape {g.shape} in GL({self._n}, {p})")
        stack = np.array(gens, dtype=np.int64).reshape(-1, self._n, self._n) % self._p
        if not _batch_invertible(stack, self._p).all():
            raise NotInvertible(f"a generator of the group in GL({self._n}, {p}) is singular")
        self._gens = list(stack)
        self._cap = cap if cap is not None else Settings.max_enum()
        self._lock = threading.Lock()
        self._closure: Optional[_Closure] = None
        self._elements: Optional[np.ndarray] = None
        self.enumerated = 0

    @classmethod
    def from_elements(
        cls, elements: np.ndarray, n: int, p: int, cap: Optional[int] = None
    ) -> "FiniteMatrixGroup":
        """
        The group whose element set is given (it must be closed under
        multiplication). A generating set is chosen greedily in the given order.

        Raises:
            InternalInvariantViolation: If the elements do not form a subgroup.
        """
        stack = np.asarray(elements, dtype=np.int64).reshape(-1, n, n)
        cap = cap if cap is not None else Settings.max_enum()
        closure = _Closure(n, p, max(cap, len(stack) + 1))
        for x in stack:
            x = np.ascontiguousarray(x)
            if x not in closure:
                closure.extend(x)
        group = cls(closure.gens, n=n, p=p, cap=cap)
        group._set_closure(closure)
        distinct = len({np.ascontiguousarray(x).tobytes() for x in stack})
        if len(closure) != distinct:
            raise InternalInvariantViolation(
                f"{distinct} matrices generate a group of order {len(closure)}"
            )
        return group

    def _set_closure(self, closure: _Closure) -> None:
        self._closure = closure
        self._elements = np.array(closure.rows)
        self.enumerated = len(closure)

    def _grow(self, count: int) -> None:
        self.enumerated = count

    def _enumerate(self) -> _Closure:
        with self._lock:
            if self._closure is None:
                closure = _Closure(self._n, self._p, self._cap, on_grow=self._grow)
                self.enumerated = 1
                for g in self._gens:
                    closure.extend(g)
                self._set_closure(closure)
                logger.debug(f"enumerated {self}")
            return self._closure  # type: ignore[return-value]

    @property
    def n(self) -> int:
        return self._n

    @property
    def p(self) -> int:
        return self._p

    @property
    def cap(self) -> int:
        return self._cap

    @property
    def generators(self) -> list[Matrix]:
        return [Matrix(g, self._p) for g in self._gens]

    @property
    def generator_arrays(self) -> list[np.ndarray]:
        return list(self._gens)

    @property
    def order(self) -> int:
        return len(self._enumerate())

    def __len__(self) -> int:
        return self.order

    def elements(self) -> np.ndarray:
        """
        All elements as an array (order, n, n), identity first, in breadth-first
        discovery order.
        """
        self._enumerate()
        return self._elements  # type: ignore[return-value]

    def __iter__(self) -> Iterator[Matrix]:
        for x in self.elements():
            yield Matrix(x, self._p)

    def contains(self, m: MatrixLike) -> bool:
        arr = _as_array(m)
        if arr.shape != (self._n, self._n):
            return False
        return arr % self._p in self._enumerate()

    def index_of(self, m: MatrixLike) -> int:
        return self._enumerate().index[(_as_array(m) % self._p).tobytes()]

    def subgroup(self, gens: Sequence[MatrixLike]) -> "FiniteMatrixGroup":
        """
        The subgroup generated by elements of this group.
        """
        for g in gens:
            if not self.contains(g):
                raise ShapeError(f"{g} is not an element of {self}")
        return FiniteMatrixGroup(
            [_as_array(g) for g in gens], n=self._n, p=self._p, cap=self._cap
        )

    def is_subgroup_of(self, other: "FiniteMatrixGroup") -> bool:
        return all(other.contains(g) for g in self._gens)

    def is_abelian(self) -> bool:
        for i, a in enumerate(self._gens):
            for b in self._gens[i + 1 :]:
                if not np.array_equal(
                    _mod_matmul(a, b, self._p), _mod_matmul(b, a, self._p)
                ):
                    return False
        return True

    def require_abelian(self) -> None:
        if not self.is_abelian():
            raise NonAbelian(f"{self} is not abelian")

    def is_p_group(self) -> bool:
        return bool(_is_power_of(np.array([self.order]), self._p)[0])

    def require_p_group(self) -> None:
        if not self.is_p_group():
            raise NotAPGroup(f"{self} has order {self.order}, not a power of {self._p}")

    def is_elementary_abelian(self) -> bool:
        if not self.is_abelian():
            return False
        identity = np.eye(self._n, dtype=np.int64)
        return all(
            np.array_equal(_batch_pow(g[None], self._p, self._p)[0], identity)
            for g in self._gens
        )

    def inverse(self, m: MatrixLike) -> np.ndarray:
        return _as_array(Matrix(_as_array(m), self._p).inverse().data)

    def commutator(self, a: MatrixLike, b: MatrixLike) -> np.ndarray:
        """
        [a, b] = a^-1 b^-1 a b.
        """
        x, y, p = _as_array(a), _as_array(b), self._p
        left = _mod_matmul(self.inverse(x), self.inverse(y), p)
        return _mod_matmul(_mod_matmul(left, x, p), y, p)

    def conjugate(self, h: MatrixLike, g: MatrixLike) -> np.ndarray:
        """
        h^g = g^-1 h g.
        """
        x, p = _as_array(g), self._p
        return _mod_matmul(_mod_matmul(self.inverse(x), _as_array(h), p), x, p)

    def normal_closure(self, gens: Sequence[MatrixLike]) -> "FiniteMatrixGroup":
        """
        The smallest normal subgroup containing gens, by closing the generating
        set under conjugation with the generators of the group.
        """
        closure = _Closure(self._n, self._p, self._cap)
        pending = [_as_array(g) % self._p for g in gens]
        while pending:
            x = np.ascontiguousarray(pending.pop())
            if closure.extend(x):
                pending.extend(self.conjugate(x, g) for g in self._gens)
        group = FiniteMatrixGroup(closure.gens, n=self._n, p=self._p, cap=self._cap)
        group._set_closure(closure)
        return group

    def commutator_subgroup(self) -> "FiniteMatrixGroup":
        gens = self._gens
        return self.normal_closure(
            [
                self.commutator(a, b)
                for i, a in enumerate(gens)
                for b in gens[i + 1 :]
            ]
        )

    def power_subgroup_closure(self, e: int) -> "FiniteMatrixGroup":
        """
        The normal closure of the commutators of the generators and their e-th
        powers, that is G' G^e.
        """
        gens = self._gens
        values = [
            self.commutator(a, b) for i, a in enumerate(gens) for b in gens[i + 1 :]
        ]
        if gens:
            values.extend(_batch_pow(np.array(gens), e, self._p))
        return self.normal_closure(values)

    def frattini_subgroup(self) -> "FiniteMatrixGroup":
        """
        Phi(G) = G' G^p, for a p-group G.

        Raises:
            NotAPGroup: If the order of the group is not a power of p.
        """
        self.require_p_group()
        return self.power_subgroup_closure(self._p)

    def generator_rank(self) -> int:
        """
        d(G) = log_p |G : Phi(G)|, the minimal number of generators of a p-group.
        """
        return _exact_log(self.order // self.frattini_subgroup().order, self._p)

    def _commuting_mask(self, others: Sequence[np.ndarray]) -> np.ndarray:
        stack = self.elements()
        mask = np.ones(len(stack), dtype=bool)
        for g in others:
            left = _mod_matmul(stack, g, self._p)
            right = _mod_matmul(g, stack, self._p)
            mask &= (left == right).all(axis=(1, 2))
        return mask

    def center(self) -> "FiniteMatrixGroup":
        mask = self._commuting_mask(self._gens)
        return FiniteMatrixGroup.from_elements(
            self.elements()[mask], self._n, self._p, self._cap
        )

    def centralizer(
        self, other: Union["FiniteMatrixGroup", Sequence[MatrixLike]]
    ) -> "FiniteMatrixGroup":
        """
        C_G(X): the elements of this group commuting with every element of X.
        """
        gens = (
            other.generator_arrays
            if isinstance(other, FiniteMatrixGroup)
            else [_as_array(x) for x in other]
        )
        mask = self._commuting_mask(gens)
        return FiniteMatrixGroup.from_elements(
            self.elements()[mask], self._n, self._p, self._cap
        )

    def is_normal(self, sub: "FiniteMatrixGroup") -> bool:
        if not sub.is_subgroup_of(self):
            return False
        return all(
            sub.contains(self.conjugate(h, g))
            for g in self._gens
            for h in sub.generator_arrays
        )

    def element_orders(self) -> np.ndarray:
        """
        The order of every element, aligned with elements().
        """
        return _orders(self.elements(), self.order, self._p)

    def element_order(self, m: MatrixLike) -> int:
        if not self.contains(m):
            raise ShapeError(f"{m} is not an element of {self}")
        return int(_orders(_as_array(m)[None] % self._p, self.order, self._p)[0])

    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders()))

    def __repr__(self) -> str:
        size = len(self._closure) if self._closure is not None else "?"
        return (
            f"FiniteMatrixGroup(n={self._n}, p={self._p}, "
            f"generators={len(self._gens)}, order={size})"
        )


def _orders(stack: np.ndarray, group_order: int, p: int) -> np.ndarray:
    # the order of x divides |G|: strip prime factors q while x^(ord/q) = 1
    n = stack.shape[-1]
    identity = np.eye(n, dtype=np.int64)
    orders = np.full(len(stack), group_order, dtype=np.int64)
    for q, e in sympy.factorint(group_order).items():
        q = int(q)
        for _ in range(int(e)):
            divisible = orders % q == 0
            if not divisible.any():
                break
            trial = orders // q
            changed = False
            for value in np.unique(trial[divisible]):
                selected = np.nonzero(divisible & (trial == value))[0]
                powered = _batch_pow(stack[selected], int(value), p)
                ones = selected[(powered == identity).all(axis=(1, 2))]
                orders[ones] = value
                changed = changed or len(ones) > 0
            if not changed:
                break
    return orders


def enumerate_elements(group: FiniteMatrixGroup) -> list[Matrix]:
    """
    The elements of the group in breadth-first order of the closure of its
    generators, starting with the identity.

    Raises:
        CapExceeded: If the group has more elements than the enumeration cap.
    """
    return list(group)


def _subgroup_of(group: FiniteMatrixGroup, mask: np.ndarray) -> FiniteMatrixGroup:
    return FiniteMatrixGroup.from_elements(
        group.elements()[mask], group.n, group.p, group.cap
    )


def _power_is_one(group: FiniteMatrixGroup, e: int) -> np.ndarray:
    identity = np.eye(group.n, dtype=np.int64)
    return (_batch_pow(group.elements(), e, group.p) == identity).all(axis=(1, 2))


def omega_t(group: FiniteMatrixGroup, t: int) -> FiniteMatrixGroup:
    """
    Omega_t(A) = {x in A : x^(p^t) = 1} for an abelian group A.

    Raises:
        NonAbelian: If the group is not abelian.
    """
    group.require_abelian()
    return _subgroup_of(group, _power_is_one(group, group.p**t))


def mho_t(group: FiniteMatrixGroup, t: int) -> FiniteMatrixGroup:
    """
    Mho_t(A) = {x^(p^t) : x in A} for an abelian group A.

    Raises:
        NonAbelian: If the group is not abelian.
    """
    group.require_abelian()
    powers = np.unique(
        _batch_pow(group.elements(), group.p**t, group.p).reshape(len(group), -1),
        axis=0,
    )
    return FiniteMatrixGroup.from_elements(powers, group.n, group.p, group.cap)


def o_p_part(group: FiniteMatrixGroup) -> FiniteMatrixGroup:
    """
    O_p(A), the elements of p-power order of an abelian group A.
    """
    group.require_abelian()
    return _subgroup_of(group, _is_power_of(group.element_orders(), group.p))


def omega_index_check(group: FiniteMatrixGroup) -> tuple[int, bool]:
    """
    The index |A : Omega_1(O_p(A))| of an abelian subgroup A of GL(n, p) and
    whether it is at most p^n.

    Returns:
        tuple[int, bool]: The index and whether the bound holds.
    """
    omega = omega_t(o_p_part(group), 1)
    index = group.order // omega.order
    logger.debug(f"|A : Omega_1(O_p(A))| = {index} for {group}")
    return index, index <= group.p**group.n


@dataclass(frozen=True)
class FiniteAbelianType:
    """
    The invariant factors of a finite abelian group, per prime.

    Attributes:
        factors (dict[int, tuple[tuple[int, int], ...]]): For each prime q, the
          pairs (q^e, multiplicity) with multiplicity >= 1, by decreasing q^e.
    """

    factors: dict[int, tuple[tuple[int, int], ...]] = field(default_factory=dict)

    @property
    def order(self) -> int:
        total = 1
        for pairs in self.factors.values():
            for size, multiplicity in pairs:
                total *= size**multiplicity
        return total

    def cyclic_factors(self) -> list[int]:
        """
        The orders of the cyclic factors, with repetition, largest first.
        """
        orders = [
            size
            for pairs in self.factors.values()
            for size, multiplicity in pairs
            for _ in range(multiplicity)
        ]
        return sorted(orders, reverse=True)

    def as_dict(self) -> dict[str, list[list[int]]]:
        return {
            str(q): [[size, multiplicity] for size, multiplicity in pairs]
            for q, pairs in sorted(self.factors.items())
        }

    def __str__(self) -> str:
        parts = []
        for size in self.cyclic_factors():
            parts.append(f"C{size}")
        return " x ".join(parts) if parts else "1"


def _abelian_type_from_orders(orders: np.ndarray) -> FiniteAbelianType:
    group_order = len(orders)
    factors: dict[int, tuple[tuple[int, int], ...]] = {}
    for q, e in sorted(sympy.factorint(group_order).items()):
        q, e = int(q), int(e)
        q_orders = orders[_is_power_of(orders, q)]
        # a_i = log_q #{x in A_q : x^(q^i) = 1}
        a = []
        i = 0
        while True:
            a.append(_exact_log(int(np.sum((q**i) % q_orders == 0)), q))
            if a[-1] == e:
                break
            i += 1
        a.append(e)
        pairs = []
        for j in range(len(a) - 2, 0, -1):
            multiplicity = 2 * a[j] - a[j - 1] - a[j + 1]
            if multiplicity < 0:
                raise InternalInvariantViolation(f"negative multiplicity of C{q**j}")
            if multiplicity:
                pairs.append((q**j, multiplicity))
        factors[q] = tuple(pairs)
    result = FiniteAbelianType(factors)
    if result.order != group_order:
        raise InternalInvariantViolation(
            f"type {result} has order {result.order}, the group {group_order}"
        )
    return result


def abelian_type(group: FiniteMatrixGroup) -> FiniteAbelianType:
    """
    The cyclic decomposition of an abelian group, derived from the numbers of
    elements whose order divides q^i.

    Raises:
        NonAbelian: If the group is not abelian.
    """
    group.require_abelian()
    return _abelian_type_from_orders(group.element_orders())


def d_phi(group: FiniteMatrixGroup) -> int:
    """
    d(Phi(O_p(A))) for an abelian A in GL(n, p): the number of invariant factors
    of order at least p^2, which is a_2 - a_1.

    Raises:
        NonAbelian: If the group is not abelian.
        InternalInvariantViolation: If the value exceeds n.
    """
    group.require_abelian()
    p = group.p
    a1 = _exact_log(int(np.sum(_power_is_one(group, p))), p)
    a2 = _exact_log(int(np.sum(_power_is_one(group, p * p))), p)
    value = a2 - a1
    if value > group.n:
        raise InternalInvariantViolation(f"d(Phi(A)) = {value} > n = {group.n}")
    return value


def verbal_w_index(group: FiniteMatrixGroup) -> int:
    """
    |P : w(P)| for the word w = x^(p^2) [y, z]. The values of w generate
    G' G^(p^2), so this is the order of the largest abelian quotient of
    exponent dividing p^2.

    Raises:
        CapExceeded: If the group is too large to enumerate.
    """
    verbal = group.power_subgroup_closure(group.p**2)
    return group.order // verbal.order


def _coefficient_grid(dim: int, p: int) -> np.ndarray:
    count = p**dim
    powers = p ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return (np.arange(count, dtype=np.int64)[:, None] // powers) % p


def unit_group_of_algebra(alg: MatAlgebra, cap: Optional[int] = None) -> FiniteMatrixGroup:
    """
    The invertible elements of a commutative algebra. The identity is adjoined
    first if the algebra does not contain it.

    Raises:
        NonCommutativeInput: If the algebra is not commutative.
        CapExceeded: If p^dim exceeds the enumeration cap.
    """
    cap = cap if cap is not None else Settings.max_enum()
    if not is_commutative(alg):
        raise NonCommutativeInput(f"{alg} is not commutative")
    if not alg.unital:
        alg = generate_algebra(alg.basis, include_identity=True, n=alg.n, p=alg.p)
    n, p = alg.n, alg.p
    if p**alg.dim > cap:
        raise CapExceeded(f"{alg} has {p}^{alg.dim} elements, over the cap {cap}")
    members = _mod_matmul(_coefficient_grid(alg.dim, p), alg.space.basis, p)
    stack = members.reshape(-1, n, n)
    units = stack[_batch_invertible(stack, p)]
    logger.debug(f"{len(units)} units in {alg}")
    return FiniteMatrixGroup.from_elements(units, n, p, cap)


def one_plus_ideal(ideal: MatAlgebra, cap: Optional[int] = None) -> FiniteMatrixGroup:
    """
    1 + B for a nilpotent algebra B, generated by 1 + b over a basis of B.
    """
    identity = np.eye(ideal.n, dtype=np.int64)
    gens = [(identity + b) % ideal.p for b in ideal.basis_array]
    return FiniteMatrixGroup(gens, n=ideal.n, p=ideal.p, cap=cap)


def zero_ideal_unit_check(alg: MatAlgebra) -> list[Check]:
    """
    For A = U(alg) and B the zero ideal extracted from alg: 1 + B is an
    elementary abelian subgroup of A of order p^dim(B), and |A : 1 + B| <= p^n.
    """
    from .zeroideal import extract_zero_ideal

    if not alg.unital:
        alg = generate_algebra(alg.basis, include_identity=True, n=alg.n, p=alg.p)
    units = unit_group_of_algebra(alg)
    ideal, _ = extract_zero_ideal(alg)
    one_plus = one_plus_ideal(ideal)
    p, n = alg.p, alg.n
    index = units.order // one_plus.order
    return [
        check("1+B is a subgroup of U(A)", True, one_plus.is_subgroup_of(units)),
        check("1+B is elementary abelian", True, one_plus.is_elementary_abelian()),
        check("|1+B| = p^dim(B)", p**ideal.dim, one_plus.order),
        check("|U(A) : 1+B| <= p^n", p**n, index, ok=index <= p**n),
    ]


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ShapeError("block_diagonal needs at least one block")
    p = blocks[0].modulus
    n = sum(b.rows for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    offset = 0
    for b in blocks:
        if not b.is_square or b.modulus != p:
            raise ShapeError(f"block of shape {b.shape} over Z/{b.modulus}")
        out[offset : offset + b.rows, offset : offset + b.rows] = b.data
        offset += b.rows
    return Matrix(out, p)


def unipotent_jordan_block(size: int, p: int) -> Matrix:
    """
    1 + N with N the nilpotent Jordan block; of order p^2 when size = p + 1.
    """
    m = np.eye(size, dtype=np.int64) + np.eye(size, k=1, dtype=np.int64)
    return Matrix(m, check_prime(p))


def jordan_block_family(k: int, p: int) -> FiniteMatrixGroup:
    """
    C_(p^2)^k inside GL(k(p+1), p): k commuting unipotent Jordan blocks of
    size p + 1 placed on the diagonal.
    """
    block = unipotent_jordan_block(p + 1, p)
    identity = Matrix.identity(p + 1, p)
    gens = [
        block_diagonal([block if i == j else identity for j in range(k)])
        for i in range(k)
    ]
    return FiniteMatrixGroup(gens)


def diagonal_group(diagonals: Sequence[Sequence[int]], p: int) -> FiniteMatrixGroup:
    """
    The group generated by invertible diagonal matrices.
    """
    gens = [Matrix.diagonal(d, check_prime(p)) for d in diagonals]
    return FiniteMatrixGroup(gens)


def companion_matrix(coeffs: Sequence[int], p: int) -> Matrix:
    """
    Companion matrix of x^n + c_(n-1) x^(n-1) + ... + c_0, coeffs = c_0..c_(n-1).
    """
    n = len(coeffs)
    m = np.zeros((n, n), dtype=np.int64)
    m[1:, :-1] = np.eye(n - 1, dtype=np.int64)
    m[:, -1] = [-c for c in coeffs]
    return Matrix(m, p)


def _has_order(m: Matrix, order: int) -> bool:
    if not (m**order).is_identity():
        return False
    return all(
        not (m ** (order // int(q))).is_identity() for q in sympy.factorint(order)
    )


def singer_cycle(n: int, p: int) -> Matrix:
    """
    A matrix of order p^n - 1 in GL(n, p): the companion matrix of the first
    primitive polynomial in lexicographic order of its coefficients.
    """
    p = check_prime(p)
    order = p**n - 1
    for tail in np.ndindex(*([p] * (n - 1))) if n > 1 else [()]:
        for c0 in range(1, p):
            m = companion_matrix([c0, *tail], p)
            if order == 1 or _has_order(m, order):
                logger.debug(f"Singer cycle for GL({n}, {p}): coefficients {[c0, *tail]}")
                return m
    raise InternalInvariantViolation(f"no primitive polynomial of degree {n} over F_{p}")


def p_prime_order_check(group: FiniteMatrixGroup) -> Check:
    """
    The p'-part of an abelian subgroup of GL(n, p) has order at most p^n - 1.
    """
    group.require_abelian()
    p_prime_order = group.order // o_p_part(group).order
    bound = group.p**group.n - 1
    return check("|A_p'| <= p^n - 1", bound, p_prime_order, ok=p_prime_order <= bound)
