"""
Builders of explicit p-groups, invariants measured on them, and the bound table.

Each builder enumerates its group and returns a BuildReport: the group, the
distinguished subgroups, and Check records comparing the value a formula
predicts (expected) with the value computed by enumeration (measured). The
formulas are never used to produce the measurements.

Small groups (order at most 512) are also turned into a CayleyGroup, on which
every subgroup can be listed to evaluate r(G), nr(G) and sr(G).
"""

import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Any, Callable, Iterable, Optional, TypedDict

import numpy as np
import sympy

from .abelgrp import (FiniteMatrixGroup, _exact_log, block_diagonal, d_phi,
                      jordan_block_family, omega_index_check,
                      zero_ideal_unit_check)
from .core import (CapExceeded, Check, InternalInvariantViolation, Settings,
                   ShapeError, check, logger)
from .exactla import Matrix, _mod_matmul, check_prime
from .matalg import diagonal_algebra


def plain(value: Any) -> Any:
    """
    A JSON and TOML friendly version of a value: integral fractions become
    ints, other fractions strings such as '13/4'.
    """
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass
class BuildReport:
    """
    A constructed group with its expectation versus measurement records.

    Attributes:
        name (str): The family of the construction.
        params (dict[str, int]): Its parameters.
        checks (list[Check]): Asserted expectations.
        measurements (dict[str, Any]): Values reported without an expectation.
        group (Optional[FiniteMatrixGroup]): The constructed group.
        subgroups (dict[str, FiniteMatrixGroup]): Distinguished subgroups.
    """

    name: str
    params: dict[str, int]
    checks: list[Check] = field(default_factory=list)
    measurements: dict[str, Any] = field(default_factory=dict)
    group: Optional[FiniteMatrixGroup] = None
    subgroups: dict[str, FiniteMatrixGroup] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": dict(self.params),
            "ok": self.ok,
            "checks": [
                {
                    "name": c["name"],
                    "expected": plain(c["expected"]),
                    "measured": plain(c["measured"]),
                    "ok": c["ok"],
                }
                for c in self.checks
            ],
            "measurements": {k: plain(v) for k, v in self.measurements.items()},
        }


def _group_prime(order: int) -> Optional[int]:
    factors = sympy.factorint(order)
    return int(next(iter(factors))) if len(factors) == 1 else None


class CayleyGroup:
    """
    A finite group as an index -> element table plus its Cayley table on indices.
    Index 0 is the identity. Subgroups are frozensets of indices.

    Args:
        group (FiniteMatrixGroup): The group to tabulate.
        cap (int, optional): Largest order accepted. Defaults to Settings.subgroup_cap.

    Raises:
        CapExceeded: If the group order exceeds cap.
    """

    def __init__(self, group: FiniteMatrixGroup, cap: Optional[int] = None) -> None:
        cap = cap if cap is not None else Settings.subgroup_cap
        if group.order > cap:
            raise CapExceeded(f"{group} is too large for a Cayley table (cap {cap})")
        elements = group.elements()
        size = len(elements)
        table = np.empty((size, size), dtype=np.int64)
        for i, x in enumerate(elements):
            products = _mod_matmul(x, elements, group.p)
            table[i] = [group.index_of(y) for y in products]
        self.group = group
        self.table = table
        self.size = size
        self.inverse = np.argmin(table, axis=1)
        self.prime = _group_prime(size)
        logger.debug(f"Cayley table of order {size}")

    def __len__(self) -> int:
        return self.size

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        members = np.zeros(self.size, dtype=bool)
        members[0] = True
        generators = np.array(sorted(set(gens)), dtype=np.int64)
        members[generators] = True
        frontier = np.nonzero(members)[0]
        while frontier.size and generators.size:
            products = np.unique(self.table[np.ix_(frontier, generators)])
            fresh = products[~members[products]]
            members[fresh] = True
            frontier = fresh
        return frozenset(np.nonzero(members)[0].tolist())

    def cyclic(self, i: int) -> frozenset[int]:
        return self.closure([i])

    def power(self, indices: np.ndarray, e: int) -> np.ndarray:
        result = np.zeros_like(indices)
        for _ in range(e):
            result = self.table[result, indices]
        return result

    def all_subgroups(self) -> list[frozenset[int]]:
        """
        Every subgroup, as joins of cyclic subgroups, smallest first.
        """
        cyclic = {self.cyclic(i) for i in range(self.size)}
        found = set(cyclic)
        frontier = list(cyclic)
        while frontier:
            grown = []
            for h in frontier:
                for c in cyclic:
                    if c <= h:
                        continue
                    joined = self.closure(h | c)
                    if joined not in found:
                        found.add(joined)
                        grown.append(joined)
            frontier = grown
        logger.debug(f"{len(found)} subgroups in a group of order {self.size}")
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def is_abelian(self, sub: frozenset[int]) -> bool:
        idx = np.array(sorted(sub), dtype=np.int64)
        block = self.table[np.ix_(idx, idx)]
        return bool(np.array_equal(block, block.T))

    def is_normal(self, sub: frozenset[int]) -> bool:
        members = np.zeros(self.size, dtype=bool)
        members[list(sub)] = True
        h = np.array(sorted(sub), dtype=np.int64)
        for g in range(self.size):
            conjugates = self.table[self.table[self.inverse[g], h], g]
            if not members[conjugates].all():
                return False
        return True

    def is_elementary_abelian(self, sub: frozenset[int]) -> bool:
        if self.prime is None or not self.is_abelian(sub):
            return False
        idx = np.array(sorted(sub), dtype=np.int64)
        return not self.power(idx, self.prime).any()

    def frattini(self, sub: frozenset[int]) -> frozenset[int]:
        """
        H' H^p for a subgroup H of a p-group.
        """
        if self.prime is None:
            raise ShapeError(f"the group of order {self.size} is not a p-group")
        idx = np.array(sorted(sub), dtype=np.int64)
        a, b = np.meshgrid(idx, idx, indexing="ij")
        commutators = self.table[
            self.table[self.inverse[a], self.inverse[b]], self.table[a, b]
        ]
        powers = self.power(idx, self.prime)
        return self.closure(set(commutators.ravel().tolist()) | set(powers.tolist()))

    def rank(self, sub: frozenset[int]) -> int:
        """
        d(H), by log_p |H : Phi(H)| in p-groups and by search otherwise.
        """
        if self.prime is None:
            return self.minimal_generator_count(sub)
        quotient = len(sub) // len(self.frattini(sub))
        return _exact_log(quotient, self.prime)

    def minimal_generator_count(self, sub: Optional[frozenset[int]] = None) -> int:
        """
        The least number of elements generating H, by a breadth first search over
        the subgroups generated by 0, 1, 2, ... elements of H.
        """
        target = sub if sub is not None else frozenset(range(self.size))
        level = {frozenset([0])}
        count = 0
        while target not in level:
            grown = set()
            for h in level:
                for x in target - h:
                    grown.add(self.closure(h | {x}))
            level = grown
            count += 1
        return count


class RankReport(TypedDict):
    order: int
    subgroups: int
    r: int
    nr: int
    sr: int


def small_group_ranks(group: FiniteMatrixGroup, cap: int = 512) -> RankReport:
    """
    r(G), nr(G) and sr(G): the largest d(A) over abelian subgroups, over normal
    abelian subgroups, and the largest d(H) over all subgroups.

    Raises:
        CapExceeded: If |G| > cap.
    """
    table = CayleyGroup(group, cap)
    subgroups = table.all_subgroups()
    r = nr = sr = 0
    for sub in subgroups:
        d = table.rank(sub)
        sr = max(sr, d)
        if table.is_abelian(sub):
            r = max(r, d)
            if table.is_normal(sub):
                nr = max(nr, d)
    if not nr <= r <= sr:
        raise InternalInvariantViolation(f"nr = {nr}, r = {r}, sr = {sr}")
    return RankReport(order=len(table), subgroups=len(subgroups), r=r, nr=nr, sr=sr)


def minimal_generator_count(group: FiniteMatrixGroup) -> int:
    """
    d(G) by exhaustive search, for |G| <= 256.
    """
    return CayleyGroup(group, cap=256).minimal_generator_count()


def _elementary(i: int, j: int, n: int, p: int) -> Matrix:
    return Matrix.identity(n, p) + Matrix.unit(i, j, n, p)


def permutation_matrix(perm: list[int], p: int = 2) -> Matrix:
    """
    The matrix sending e_i to e_(perm[i]).
    """
    n = len(perm)
    m = np.zeros((n, n), dtype=np.int64)
    m[perm, np.arange(n)] = 1
    return Matrix(m, p)


def dihedral_group(order: int, p: int = 2) -> FiniteMatrixGroup:
    """
    The dihedral group of the given order acting on order/2 points, as
    permutation matrices over F_p.
    """
    points = order // 2
    if order % 2 or points < 3:
        raise ShapeError(f"no dihedral group of order {order} on {points} points")
    rotation = [(i + 1) % points for i in range(points)]
    reflection = [(-i) % points for i in range(points)]
    return FiniteMatrixGroup(
        [permutation_matrix(rotation, p), permutation_matrix(reflection, p)]
    )


def quaternion_group() -> FiniteMatrixGroup:
    """
    Q_8 inside GL(2, 3).
    """
    i = Matrix([[0, -1], [1, 0]], 3)
    j = Matrix([[1, 1], [1, -1]], 3)
    return FiniteMatrixGroup([i, j])


def unitriangular_group(n: int, p: int) -> FiniteMatrixGroup:
    """
    UT(n, p), a Sylow p-subgroup of GL(n, p), generated by 1 + E_(i, i+1).
    """
    p = check_prime(p)
    return FiniteMatrixGroup([_elementary(i, i + 1, n, p) for i in range(n - 1)])


def _equal_subgroups(a: FiniteMatrixGroup, b: FiniteMatrixGroup) -> bool:
    return a.order == b.order and a.is_subgroup_of(b)


def build_example_semidirect(m: int, p: int) -> BuildReport:
    """
    G = V x| H with V = F_p^(2m), V_1 the span of the first m coordinates and H
    the transvections fixing V_1 and V/V_1, realized as affine maps in
    GL(2m + 1, p). V and V_1 x H are both self-centralizing elementary abelian
    normal subgroups, with d(V) = 2m = k and d(V_1 x H) = k^2/4 + k/2.

    Raises:
        CapExceeded: If p^(2m + m^2) exceeds the enumeration cap.
    """
    p = check_prime(p)
    k = 2 * m
    size = k + 1
    translations = [_elementary(i, k, size, p) for i in range(k)]
    transvections = [
        _elementary(i, m + j, size, p) for i in range(m) for j in range(m)
    ]
    group = FiniteMatrixGroup(translations + transvections)
    v = group.subgroup(translations)
    v1h = group.subgroup(translations[:m] + transvections)

    report = BuildReport("example_semidirect", {"m": m, "p": p}, group=group)
    report.subgroups = {"V": v, "V1xH": v1h}
    d_v, d_v1h = v.generator_rank(), v1h.generator_rank()
    rank_formula = Fraction(k * k, 4) + Fraction(k, 2)
    report.checks = [
        check("|G| = p^(2m + m^2)", p ** (k + m * m), group.order),
        check("d(V) = k", k, d_v),
        check("d(V1 x H) = k^2/4 + k/2", rank_formula, d_v1h),
        check("V is elementary abelian", True, v.is_elementary_abelian()),
        check("V1 x H is elementary abelian", True, v1h.is_elementary_abelian()),
        check("V is normal", True, group.is_normal(v)),
        check("V1 x H is normal", True, group.is_normal(v1h)),
        check("C_G(V) = V", True, _equal_subgroups(group.centralizer(v), v)),
        check("C_G(V1 x H) = V1 x H", True, _equal_subgroups(group.centralizer(v1h), v1h)),
    ]
    report.measurements = {"k": k, "d(G)": group.generator_rank()}
    return report


def pattern_positions(n: int) -> list[tuple[int, int]]:
    """
    The entries (i, j), 1 <= i < j <= n, with j >= h and i <= h, h = ceil(n/2).
    """
    h = ceil(n / 2)
    return [
        (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if j >= h and i <= h
    ]


def build_pattern_group(n: int, p: int) -> BuildReport:
    """
    The unipotent pattern group 1 + sum a_ij E_ij over pattern_positions(n).
    Phi(G) = G' = Z(G) has rank floor(n/2) (ceil(n/2) - 1).

    Raises:
        CapExceeded: If the group is too large to enumerate.
    """
    p = check_prime(p)
    positions = pattern_positions(n)
    group = FiniteMatrixGroup([_elementary(i - 1, j - 1, n, p) for i, j in positions])
    frattini = group.frattini_subgroup()
    derived = group.commutator_subgroup()
    center = group.center()
    expected = floor(n / 2) * (ceil(n / 2) - 1)
    d_group = group.generator_rank()

    report = BuildReport("pattern", {"n": n, "p": p}, group=group)
    report.subgroups = {"Phi": frattini, "G'": derived, "Z": center}
    report.checks = [
        check("|G| = p^(number of positions)", p ** len(positions), group.order),
        check("Phi(G) = G'", True, _equal_subgroups(frattini, derived)),
        check("Phi(G) = Z(G)", True, _equal_subgroups(frattini, center)),
        check("d(Phi(G)) = floor(n/2)(ceil(n/2) - 1)", expected, frattini.generator_rank()),
    ]
    report.measurements = {"d(G)": d_group}
    return report


def sylow_frattini_check(n: int, p: int) -> int:
    """
    d(Phi(UT(n, p))), checked against 2n - 5 for n in {4, 5}.

    Raises:
        InternalInvariantViolation: If n is 4 or 5 and the value is not 2n - 5.
    """
    value = unitriangular_group(n, p).frattini_subgroup().generator_rank()
    if n in (4, 5) and value != 2 * n - 5:
        raise InternalInvariantViolation(f"d(Phi(UT({n}, {p}))) = {value} != {2 * n - 5}")
    return value


def build_sylow_frattini(n: int, p: int) -> BuildReport:
    group = unitriangular_group(n, p)
    frattini = group.frattini_subgroup()
    value = frattini.generator_rank()
    report = BuildReport("sylow_frattini", {"n": n, "p": p}, group=group)
    report.subgroups = {"Phi": frattini}
    report.checks = [check("|UT(n, p)| = p^(n(n-1)/2)", p ** (n * (n - 1) // 2), group.order)]
    if n in (4, 5):
        report.checks.append(check("d(Phi(G)) = 2n - 5", 2 * n - 5, value))
    report.measurements = {"d(Phi(G))": value, "d(G)": group.generator_rank()}
    return report


def build_d16_power_evidence() -> BuildReport:
    """
    D_16 has no normal elementary abelian subgroup of rank 2 but contains the
    Klein subgroup <r^4, s>; in D_16 x D_16 the product of two Klein subgroups is
    elementary abelian of rank 4 while the center has rank 2.
    """
    d16 = dihedral_group(16)
    r, s = d16.generators
    table = CayleyGroup(d16)
    normal_ranks = [
        table.rank(sub)
        for sub in table.all_subgroups()
        if table.is_elementary_abelian(sub) and table.is_normal(sub)
    ]
    klein = d16.subgroup([r**4, s])

    one = Matrix.identity(r.rows, 2)
    square = FiniteMatrixGroup(
        [block_diagonal([g, one]) for g in (r, s)]
        + [block_diagonal([one, g]) for g in (r, s)]
    )
    witness = square.subgroup(
        [
            block_diagonal([r**4, one]),
            block_diagonal([s, one]),
            block_diagonal([one, r**4]),
            block_diagonal([one, s]),
        ]
    )
    center = square.center()

    report = BuildReport("d16", {}, group=d16)
    report.subgroups = {"klein": klein, "witness": witness, "Z(D16^2)": center}
    report.checks = [
        check("|D16| = 16", 16, d16.order),
        check("max rank of a normal elementary abelian subgroup", 1, max(normal_ranks)),
        check("<r^4, s> is elementary abelian", True, klein.is_elementary_abelian()),
        check("d(<r^4, s>) = 2", 2, klein.generator_rank()),
        check("|D16^2| = 256", 256, square.order),
        check("Klein^2 is elementary abelian", True, witness.is_elementary_abelian()),
        check("d(Klein^2) = 4", 4, witness.generator_rank()),
        check("d(Z(D16^2)) = 2", 2, center.generator_rank()),
    ]
    return report


def build_jordan_family(k: int, p: int) -> BuildReport:
    """
    C_(p^2)^k in GL(k(p+1), p): |A : Omega_1(A)| = p^k and d(Phi(A)) = k.
    """
    group = jordan_block_family(k, p)
    n = k * (p + 1)
    index, bound_ok = omega_index_check(group)
    report = BuildReport("jordan", {"k": k, "p": p}, group=group)
    report.checks = [
        check("|A : Omega_1(O_p(A))| = p^k", p**k, index),
        check("|A : Omega_1(O_p(A))| <= p^n", p**n, index, ok=bound_ok),
        check("d(Phi(A)) = k", k, d_phi(group)),
        check("exp(A) = p^2", p * p, group.exponent()),
    ]
    return report


def bound_table(k: int, n: Optional[int] = None) -> dict[str, Any]:
    """
    Every stated bound evaluated at k (and n), exactly, as Fractions. With n the
    chain k^2/4 + 1 + k(n - k) = nk - 3k^2/4 + 1 <= n^2/3 + 1 is verified.

    Args:
        k (int): Rank of the maximal elementary abelian normal subgroup, or of
          G/Phi(G) for the automorphism bounds.
        n (Optional[int]): Matrix size, or log_p |G| for the automorphism bounds.

    Raises:
        ShapeError: If k < 1 or k > n.
        InternalInvariantViolation: If the chain fails.
    """
    if k < 1 or (n is not None and k > n):
        raise ShapeError(f"bound table needs 1 <= k <= n, got k={k}, n={n}")
    q = Fraction
    table: dict[str, Any] = {
        "k": k,
        "sectional_rank_odd": q(k * (k + 1), 2),
        "sectional_rank_odd_sharp": q(k * (k + 4), 4),
        "sectional_rank_even": q(k * k) + q(k * (k + 1), 2),
        "subgroup_rank_even": 2 * k + q(k * k, 4),
        "subgroup_rank_any": q(k * k, 4) + 2 * k + 1,
        "mho_index_log2": q(k * (k + 5), 2),
        "frattini_rank_abelian_odd": q(2 * k),
        "frattini_rank_abelian_even": q(3 * k),
        "semidirect_rank": q(k * k, 4) + q(k, 2),
    }
    if n is not None:
        chain = q(k * k, 4) + 1 + k * (n - k)
        closed = n * k - q(3 * k * k, 4) + 1
        aut_bound = q(n * n, 3) + 1
        if chain != closed or closed > aut_bound:
            raise InternalInvariantViolation(
                f"chain {chain} = {closed} <= {aut_bound} fails at k={k}, n={n}"
            )
        table.update(
            {
                "n": n,
                "p_subgroup_rank_gl": q(n * n, 4),
                "subgroup_rank_gl2": q(n * n, 4) + 1,
                "aut_p_subgroup_rank": q(n * n, 3),
                "aut_section_rank": aut_bound,
                "aut_chain": closed,
                "large_rank_condition": k * (k - 1) > 2 * n,
            }
        )
    return table


def instance_checks(report: BuildReport) -> list[Check]:
    """
    The stated bounds that apply to a built instance, as checks.
    """
    extra: list[Check] = []
    params = report.params
    if report.name == "pattern" and params["p"] == 2:
        n = params["n"]
        d = report.measurements["d(G)"]
        extra.append(check("d(G) <= n^2/4", Fraction(n * n, 4), d, ok=d <= Fraction(n * n, 4)))
    if report.name == "example_semidirect":
        k, p = report.measurements["k"], params["p"]
        table = bound_table(k)
        key = "subgroup_rank_even" if p == 2 else "sectional_rank_odd"
        for label, value in (
            ("d(V1 x H)", report.subgroups["V1xH"].generator_rank()),
            ("d(G)", report.measurements["d(G)"]),
        ):
            extra.append(check(f"{label} <= {key}(k)", table[key], value, ok=value <= table[key]))
    if report.name == "sylow_frattini":
        n = params["n"]
        d = report.measurements["d(G)"]
        extra.append(check("d(G) <= n^2/4", Fraction(n * n, 4), d, ok=d <= Fraction(n * n, 4)))
    return extra


def _zero_ideal_case() -> BuildReport:
    report = BuildReport("zero_ideal_units", {"n": 3, "p": 3})
    report.checks = zero_ideal_unit_check(diagonal_algebra(3, 3))
    return report


SUITE: dict[str, Callable[[], BuildReport]] = {
    "example_semidirect_m1_p2": lambda: build_example_semidirect(1, 2),
    "example_semidirect_m2_p2": lambda: build_example_semidirect(2, 2),
    "example_semidirect_m2_p3": lambda: build_example_semidirect(2, 3),
    "example_semidirect_m3_p2": lambda: build_example_semidirect(3, 2),
    "pattern_n4_p2": lambda: build_pattern_group(4, 2),
    "pattern_n5_p2": lambda: build_pattern_group(5, 2),
    "pattern_n6_p2": lambda: build_pattern_group(6, 2),
    "pattern_n4_p3": lambda: build_pattern_group(4, 3),
    "sylow_frattini_n4_p2": lambda: build_sylow_frattini(4, 2),
    "sylow_frattini_n5_p2": lambda: build_sylow_frattini(5, 2),
    "sylow_frattini_n4_p3": lambda: build_sylow_frattini(4, 3),
    "d16": build_d16_power_evidence,
    "jordan_k1_p2": lambda: build_jordan_family(1, 2),
    "jordan_k2_p2": lambda: build_jordan_family(2, 2),
    "jordan_k3_p2": lambda: build_jordan_family(3, 2),
    "jordan_k1_p3": lambda: build_jordan_family(1, 3),
    "zero_ideal_units": _zero_ideal_case,
}


def run_case(name: str) -> dict[str, Any]:
    """
    Build one suite case, add the bounds applicable to it, and return its record.
    """
    try:
        builder = SUITE[name]
    except KeyError:
        raise ShapeError(f"unknown sanity case '{name}'") from None
    report = builder()
    report.checks.extend(instance_checks(report))
    logger.debug(f"case {name}: ok={report.ok}")
    record = report.record()
    record["case"] = name
    return record


class SuiteReport(TypedDict):
    ok: bool
    cases: list[dict[str, Any]]


def sanity_suite(names: Optional[list[str]] = None, processes: int = 1) -> SuiteReport:
    """
    Run the builders and check every applicable bound on what they build. The
    cases are independent; with processes > 1 they run in a process pool and
    the records come back in the order of names.
    """
    names = list(SUITE) if names is None else names
    if processes > 1 and len(names) > 1:
        with multiprocessing.Pool(processes) as pool:
            cases = pool.map(run_case, names)
    else:
        cases = [run_case(name) for name in names]
    return SuiteReport(ok=all(c["ok"] for c in cases), cases=cases)
