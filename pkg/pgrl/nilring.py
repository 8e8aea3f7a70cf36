"""
Class two p-groups from alternating forms.

Let R = Z/p^r, A = R^n and B = R^k. A VectorForm holds k alternating n x n
matrices M_1..M_k over R. It turns S = A + B into a ring with S^3 = 0: for
s = (a, b) and t = (a', b'),

    s * t = (0, q(a, a')),   q(a, a')_c = sum_(i < j) a_i a'_j M_c[i, j],

so B annihilates S from both sides and e_i e_j = phi(e_i, e_j) for i < j while
e_i e_j = 0 for i >= j. The set G = 1 + S with (1 + s)(1 + t) = 1 + s + t + st
is a group, nilpotent of class at most two, of order p^(r(n + k)), with
N = 1 + B central and G/N homocyclic of exponent p^r and rank n.

Elements are coordinate pairs, never matrices, so arithmetic costs O(n^2 k)
whatever the group order.
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Optional

import numpy as np

from .core import (CapExceeded, Check, DimensionTooLarge,
                   InternalInvariantViolation, NotAlternating, Settings,
                   ShapeError, check, logger, prime_power)
from .exactla import check_prime

MAX_MODULUS = 2**24


@dataclass(frozen=True, eq=False)
class VectorForm:
    """
    An alternating bilinear map R^n x R^n -> R^k, R = Z/p^r, given by its k
    component matrices.

    Args:
        p (int): The prime.
        r (int): The exponent, r >= 1.
        mats (np.ndarray): Array of shape (k, n, n), each component alternating.

    Raises:
        NotAlternating: If a component has a nonzero diagonal entry or
          M[j, i] != -M[i, j].
    """

    p: int
    r: int
    mats: np.ndarray

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.r < 1:
            raise ShapeError(f"exponent r should be at least 1, got {self.r}")
        if self.p**self.r > MAX_MODULUS:
            raise DimensionTooLarge(
                f"modulus {self.p}^{self.r} exceeds the supported {MAX_MODULUS}"
            )
        mats = np.array(self.mats, dtype=np.int64)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or min(mats.shape) < 1:
            raise ShapeError(f"form components of shape {mats.shape}, expected (k, n, n)")
        mats %= self.modulus
        diagonal = np.diagonal(mats, axis1=1, axis2=2)
        if diagonal.any():
            raise NotAlternating("a component of the form has a nonzero diagonal")
        if ((mats + mats.transpose(0, 2, 1)) % self.modulus).any():
            raise NotAlternating("a component of the form is not antisymmetric")
        mats.setflags(write=False)
        object.__setattr__(self, "mats", mats)

    @classmethod
    def from_upper(cls, p: int, r: int, mats: np.ndarray) -> "VectorForm":
        """
        The form whose strict upper triangles are those of mats; the diagonal is
        set to zero and the lower triangle to the negated transpose.
        """
        upper = np.triu(np.array(mats, dtype=np.int64), 1) % p**r
        return cls(p, r, (upper - upper.transpose(0, 2, 1)) % p**r)

    @classmethod
    def zero(cls, p: int, r: int, n: int, k: int) -> "VectorForm":
        return cls(p, r, np.zeros((k, n, n), dtype=np.int64))

    @classmethod
    def symplectic(cls, p: int, m: int, r: int = 1) -> "VectorForm":
        """
        The standard nondegenerate form on R^(2m) with k = 1: e_(2i) . e_(2i+1) = 1.
        """
        mat = np.zeros((1, 2 * m, 2 * m), dtype=np.int64)
        for i in range(m):
            mat[0, 2 * i, 2 * i + 1] = 1
        return cls.from_upper(p, r, mat)

    @property
    def modulus(self) -> int:
        return self.p**self.r

    @property
    def n(self) -> int:
        return self.mats.shape[1]

    @property
    def k(self) -> int:
        return self.mats.shape[0]

    @property
    def upper(self) -> np.ndarray:
        return np.triu(self.mats, 1)

    def evaluate(self, a: np.ndarray, a2: np.ndarray) -> np.ndarray:
        """
        The full alternating evaluation: component c is sum_(i, j) a_i a2_j M_c[i, j].
        """
        outer = np.multiply.outer(np.asarray(a) % self.modulus, np.asarray(a2) % self.modulus)
        return np.einsum("ij,cij->c", outer % self.modulus, self.mats) % self.modulus

    def reduced(self) -> "VectorForm":
        return VectorForm(self.p, 1, self.mats % self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorForm):
            return NotImplemented
        return (
            self.p == other.p
            and self.r == other.r
            and bool(np.array_equal(self.mats, other.mats))
        )

    def __hash__(self) -> int:
        return hash((self.p, self.r, self.mats.shape, self.mats.tobytes()))

    def __repr__(self) -> str:
        return f"VectorForm(p={self.p}, r={self.r}, n={self.n}, k={self.k})"


class NilRingElement:
    """
    An element s = (a, b) of S = A + B, entries reduced modulo p^r.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: np.ndarray, b: np.ndarray) -> None:
        self.a = np.array(a, dtype=np.int64)
        self.b = np.array(b, dtype=np.int64)
        self.a.setflags(write=False)
        self.b.setflags(write=False)

    @classmethod
    def zero(cls, form: VectorForm) -> "NilRingElement":
        return cls(np.zeros(form.n, dtype=np.int64), np.zeros(form.k, dtype=np.int64))

    @classmethod
    def basis_a(cls, form: VectorForm, i: int) -> "NilRingElement":
        a = np.zeros(form.n, dtype=np.int64)
        a[i] = 1
        return cls(a, np.zeros(form.k, dtype=np.int64))

    @classmethod
    def from_b(cls, form: VectorForm, b: np.ndarray) -> "NilRingElement":
        return cls(np.zeros(form.n, dtype=np.int64), np.asarray(b) % form.modulus)

    @property
    def key(self) -> bytes:
        return self.a.tobytes() + self.b.tobytes()

    def is_zero(self) -> bool:
        return not self.a.any() and not self.b.any()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NilRingElement):
            return NotImplemented
        return bool(np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"NilRingElement(a={self.a.tolist()}, b={self.b.tolist()})"


class GroupElement:
    """
    The element 1 + s of G = 1 + S.
    """

    __slots__ = ("s",)

    def __init__(self, s: NilRingElement) -> None:
        self.s = s

    @classmethod
    def identity(cls, form: VectorForm) -> "GroupElement":
        return cls(NilRingElement.zero(form))

    def is_identity(self) -> bool:
        return self.s.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.s == other.s

    def __hash__(self) -> int:
        return hash(self.s)

    def __repr__(self) -> str:
        return f"GroupElement(1 + {self.s})"


def _check_element(s: NilRingElement, form: VectorForm) -> None:
    if s.a.shape != (form.n,) or s.b.shape != (form.k,):
        raise ShapeError(
            f"element with parts of sizes {s.a.shape}/{s.b.shape} for {form}"
        )


def ring_add(s: NilRingElement, t: NilRingElement, form: VectorForm) -> NilRingElement:
    q = form.modulus
    return NilRingElement((s.a + t.a) % q, (s.b + t.b) % q)


def ring_scale(s: NilRingElement, c: int, form: VectorForm) -> NilRingElement:
    q = form.modulus
    c %= q
    return NilRingElement((s.a * c) % q, (s.b * c) % q)


def ring_mul(s: NilRingElement, t: NilRingElement, form: VectorForm) -> NilRingElement:
    """
    s * t = (0, q(s.a, t.a)) with q the strict upper triangle part of the form;
    the B parts of the factors do not contribute.
    """
    _check_element(s, form)
    _check_element(t, form)
    m = form.modulus
    outer = np.multiply.outer(s.a, t.a) % m
    b = np.einsum("ij,cij->c", outer, form.upper) % m
    return NilRingElement(np.zeros(form.n, dtype=np.int64), b)


def group_mul(g: GroupElement, h: GroupElement, form: VectorForm) -> GroupElement:
    """
    (1 + s)(1 + t) = 1 + s + t + st.
    """
    return GroupElement(
        ring_add(ring_add(g.s, h.s, form), ring_mul(g.s, h.s, form), form)
    )


def group_inv(g: GroupElement, form: VectorForm) -> GroupElement:
    """
    (1 + s)^-1 = 1 - s + s^2, exact because s^3 = 0.
    """
    s = g.s
    return GroupElement(
        ring_add(ring_scale(s, -1, form), ring_mul(s, s, form), form)
    )


def commutator(g: GroupElement, h: GroupElement, form: VectorForm) -> GroupElement:
    """
    [g, h] = g^-1 h^-1 g h, checked against the closed form 1 + st - ts.

    Raises:
        InternalInvariantViolation: If the two computations disagree.
    """
    direct = group_mul(
        group_mul(group_mul(group_inv(g, form), group_inv(h, form), form), g, form),
        h,
        form,
    )
    st = ring_mul(g.s, h.s, form)
    ts = ring_mul(h.s, g.s, form)
    closed = GroupElement(ring_add(st, ring_scale(ts, -1, form), form))
    if direct != closed:
        raise InternalInvariantViolation(f"[g, h] = {direct}, but 1 + st - ts = {closed}")
    return direct


def group_pow(g: GroupElement, m: int, form: VectorForm) -> GroupElement:
    """
    (1 + s)^m = 1 + m s + C(m, 2) s^2 for m >= 0; negative m inverts first.
    """
    if m < 0:
        return group_pow(group_inv(g, form), -m, form)
    s = g.s
    square = ring_mul(s, s, form)
    return GroupElement(
        ring_add(ring_scale(s, m, form), ring_scale(square, comb(m, 2), form), form)
    )


def group_pow_by_multiplication(g: GroupElement, m: int, form: VectorForm) -> GroupElement:
    result = GroupElement.identity(form)
    for _ in range(m):
        result = group_mul(result, g, form)
    return result


def commutes(g: GroupElement, h: GroupElement, form: VectorForm) -> bool:
    return group_mul(g, h, form) == group_mul(h, g, form)


def commutation_form_vanishes(g: GroupElement, h: GroupElement, form: VectorForm) -> bool:
    """
    Whether the full alternating form vanishes on the A parts; equivalent to
    g and h commuting.
    """
    return not form.evaluate(g.s.a, h.s.a).any()


def reduce_mod_p(g: GroupElement, form: VectorForm) -> GroupElement:
    """
    The image of g under the reduction G -> 1 + S/pS, a group homomorphism onto
    the group of form.reduced().
    """
    return GroupElement(NilRingElement(g.s.a % form.p, g.s.b % form.p))


def lift_form(form: VectorForm, r: int) -> VectorForm:
    """
    The canonical lift of a form over F_p to Z/p^r: upper triangle entries in
    [0, p) are kept, the lower triangle is their negation modulo p^r.
    """
    if form.r != 1:
        raise ShapeError(f"only forms over F_p can be lifted, got {form}")
    return VectorForm.from_upper(form.p, r, form.upper)


def quotient_type_check(form: VectorForm) -> bool:
    """
    Whether G/N is homocyclic of rank n and exponent p^r, N = 1 + B: each 1 + e_i
    has order exactly p^r modulo N and the images commute modulo N.
    """
    p, r = form.p, form.r
    for i in range(form.n):
        g = GroupElement(NilRingElement.basis_a(form, i))
        if group_pow(g, p**r, form).s.a.any():
            return False
        if not group_pow(g, p ** (r - 1), form).s.a.any():
            return False
    for i, j in itertools.combinations(range(form.n), 2):
        g = GroupElement(NilRingElement.basis_a(form, i))
        h = GroupElement(NilRingElement.basis_a(form, j))
        if commutator(g, h, form).s.a.any():
            return False
    return True


def random_form(p: int, r: int, n: int, k: int, rng: np.random.Generator) -> VectorForm:
    """
    A form with independent uniform strict upper triangle entries.
    """
    upper = rng.integers(0, p**r, size=(k, n, n), dtype=np.int64)
    return VectorForm.from_upper(p, r, upper)


def random_element(form: VectorForm, rng: np.random.Generator) -> GroupElement:
    m = form.modulus
    return GroupElement(
        NilRingElement(
            rng.integers(0, m, size=form.n, dtype=np.int64),
            rng.integers(0, m, size=form.k, dtype=np.int64),
        )
    )


def group_order(form: VectorForm) -> int:
    return form.p ** (form.r * (form.n + form.k))


def enumerate_group(form: VectorForm, cap: Optional[int] = None) -> Iterator[GroupElement]:
    """
    All p^(r(n + k)) elements, in lexicographic order of their coordinates.

    Raises:
        CapExceeded: If the group order exceeds the enumeration cap.
    """
    cap = cap if cap is not None else Settings.max_enum()
    if group_order(form) > cap:
        raise CapExceeded(f"{form} defines a group of order {group_order(form)} > {cap}")
    n = form.n
    for coords in itertools.product(range(form.modulus), repeat=n + form.k):
        yield GroupElement(NilRingElement(np.array(coords[:n]), np.array(coords[n:])))


def _cyclic_span(g: GroupElement, order: int, form: VectorForm) -> list[GroupElement]:
    return [group_pow(g, e, form) for e in range(order)]


def max_homocyclic_rank(form: VectorForm, cap: int = 2**12) -> int:
    """
    The largest m with C_(p^r)^m isomorphic to a subgroup of G, by a depth
    first search over commuting elements of order p^r whose cyclic groups meet
    the subgroup built so far trivially. Exponential: tiny forms only.

    Raises:
        CapExceeded: If the group order exceeds cap.
    """
    p, r = form.p, form.r
    top = p**r
    below = p ** (r - 1)
    candidates = [
        g
        for g in enumerate_group(form, cap)
        if not group_pow(g, below, form).is_identity()
    ]
    logger.debug(f"{len(candidates)} elements of order {top} in the group of {form}")
    best = 0

    def extend(chosen: list[GroupElement], members: set[GroupElement], start: int) -> None:
        nonlocal best
        best = max(best, len(chosen))
        if len(chosen) + len(candidates) - start <= best:
            return
        for index in range(start, len(candidates)):
            x = candidates[index]
            if x in members or not all(commutes(x, y, form) for y in chosen):
                continue
            powers = _cyclic_span(x, top, form)
            if any(z in members for z in powers[1:]):
                continue
            grown = {group_mul(m, z, form) for m in members for z in powers}
            extend(chosen + [x], grown, index + 1)

    extend([], {GroupElement.identity(form)}, 0)
    return best


def homocyclic_isotropy_check(form: VectorForm) -> Check:
    """
    max_homocyclic_rank(form) <= max_isotropic_dim(reduced form) + k.
    """
    from .isotropy import max_isotropic_dim

    rank = max_homocyclic_rank(form)
    iso, _ = max_isotropic_dim(form.reduced())
    return check(
        "homocyclic rank <= isotropic dim + k",
        iso + form.k,
        rank,
        ok=rank <= iso + form.k,
    )


def form_from_prime_power(q: int, mats: np.ndarray) -> VectorForm:
    """
    The form over Z/q, q a prime power, with the strict upper triangles of mats.
    """
    p, r = prime_power(q)
    return VectorForm.from_upper(p, r, mats)
