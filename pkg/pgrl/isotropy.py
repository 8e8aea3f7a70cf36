"""
Totally isotropic subspaces of alternating forms F_p^n x F_p^n -> F_p^k.

A subspace W is totally isotropic when the form vanishes on W x W. The largest
dimension of such a subspace is found by a depth first search which only ever
extends W by vectors of its orthogonal space perp(W), so every node of the search
is isotropic; a brute force over all subspaces serves as the oracle.
random_form_search samples forms looking for one without a k-dimensional
isotropic subspace.
"""

import itertools
import multiprocessing
from typing import Iterator, Optional, TypedDict

import numpy as np

from .core import ShapeError, TooLarge, logger
from .exactla import Subspace, _mod_matmul, _nullspace, enumerate_subspaces, subspace_sum
from .nilring import VectorForm, random_form

EXHAUSTIVE_LIMIT = 2**24
"""
Largest p^n for which max_isotropic_dim runs.
"""


def _require_field(form: VectorForm) -> None:
    if form.r != 1:
        raise ShapeError(f"isotropy is defined for forms over F_p, got {form}")


def form_eval(form: VectorForm, a: np.ndarray, a2: np.ndarray) -> np.ndarray:
    """
    The value in F_p^k of the form on (a, a2), using the full alternating matrices.
    """
    _require_field(form)
    return form.evaluate(a, a2)


def is_totally_isotropic(form: VectorForm, w: Subspace) -> bool:
    _require_field(form)
    if w.ambient_dim != form.n or w.p != form.p:
        raise ShapeError(f"{w} is not a subspace of the domain of {form}")
    if w.dim < 2:
        return True
    basis = w.basis
    values = np.einsum("ai,cij,bj->abc", basis, form.mats, basis) % form.p
    return not values.any()


def orthogonal_space(form: VectorForm, w: Subspace) -> Subspace:
    """
    perp(W) = {v : form(w, v) = 0 for all w in W}.
    """
    n, p = form.n, form.p
    if w.dim == 0:
        return Subspace.full(n, p)
    rows = np.einsum("ai,cij->acj", w.basis, form.mats).reshape(-1, n) % p
    return Subspace(_nullspace(rows, p), n, p)


def _lines(space: Subspace) -> Iterator[np.ndarray]:
    # one vector per line of the space: coefficient vectors whose first
    # nonzero entry is 1, in lexicographic order
    d, p = space.dim, space.p
    for lead in range(d):
        for tail in itertools.product(range(p), repeat=d - lead - 1):
            coeffs = np.array([0] * lead + [1] + list(tail), dtype=np.int64)
            yield _mod_matmul(coeffs, space.basis, p)


def max_isotropic_dim(form: VectorForm) -> tuple[int, Subspace]:
    """
    The largest dimension of a totally isotropic subspace and a witness.

    Args:
        form (VectorForm): An alternating form over F_p.

    Returns:
        tuple[int, Subspace]: The dimension and a subspace attaining it.

    Raises:
        TooLarge: If p^n exceeds EXHAUSTIVE_LIMIT.
    """
    _require_field(form)
    n, p = form.n, form.p
    if p**n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"{p}^{n} vectors is beyond the exhaustive isotropy search")

    best = Subspace.zero(n, p)
    seen: set[bytes] = set()

    def visit(w: Subspace) -> None:
        nonlocal best
        if w.key in seen:
            return
        seen.add(w.key)
        if w.dim > best.dim:
            best = w
        room = orthogonal_space(form, w)
        if room.dim <= best.dim:
            return
        complement = Subspace([w.reduce(v) for v in room.basis], n, p)
        for v in _lines(complement):
            visit(subspace_sum(w, Subspace(v, n, p)))
            if best.dim == n:
                return

    visit(Subspace.zero(n, p))
    logger.debug(f"max isotropic dimension {best.dim} for {form} ({len(seen)} nodes)")
    return best.dim, best


def brute_force_max_isotropic_dim(form: VectorForm) -> tuple[int, Subspace]:
    """
    The same value as max_isotropic_dim, by testing every subspace from the
    largest dimension down.
    """
    _require_field(form)
    for dim in range(form.n, -1, -1):
        for w in enumerate_subspaces(form.n, form.p, dim):
            if is_totally_isotropic(form, w):
                return dim, w
    raise ShapeError(f"no isotropic subspace found for {form}")


class TrialResult(TypedDict):
    trial: int
    max_isotropic_dim: int
    brute_force_dim: Optional[int]
    upper: list[list[list[int]]]


class SearchReport(TypedDict):
    """
    Outcome of random_form_search.

    Attributes:
        success (bool): A form with no k-dimensional isotropic subspace was found.
        best_form (Optional[list]): Strict upper triangles of the best form.
        best_max_isotropic_dim (Optional[int]): Its max isotropic dimension.
        best_trial (Optional[int]): The trial that produced it.
        histogram (dict[str, int]): Number of trials per max isotropic dimension.
        brute_force_agreements (Optional[int]): With exhaustive, the number of
          trials where the brute force agreed with the search.
    """

    n: int
    k: int
    p: int
    trials: int
    seed: int
    success: bool
    successes: int
    best_form: Optional[list[list[list[int]]]]
    best_max_isotropic_dim: Optional[int]
    best_trial: Optional[int]
    histogram: dict[str, int]
    brute_force_agreements: Optional[int]


def _trial(args: tuple[int, int, int, int, int, bool]) -> TrialResult:
    n, k, p, seed, index, exhaustive = args
    rng = np.random.default_rng([seed, index])
    form = random_form(p, 1, n, k, rng)
    dim, _ = max_isotropic_dim(form)
    brute = brute_force_max_isotropic_dim(form)[0] if exhaustive else None
    return TrialResult(
        trial=index,
        max_isotropic_dim=dim,
        brute_force_dim=brute,
        upper=form.upper.tolist(),
    )


def random_form_search(
    n: int,
    k: int,
    p: int,
    trials: int,
    seed: int,
    processes: int = 1,
    exhaustive: bool = False,
) -> SearchReport:
    """
    Sample trials alternating forms F_p^n x F_p^n -> F_p^k with independent
    uniform component matrices and look for one whose max isotropic dimension
    is below k.

    Trial i draws from numpy.random.default_rng([seed, i]), so the report does
    not depend on the number of worker processes.

    Args:
        n (int): Dimension of the domain.
        k (int): Dimension of the values.
        p (int): The prime.
        trials (int): Number of sampled forms.
        seed (int): 64 bit unsigned seed.
        processes (int, optional): Worker processes. Defaults to 1.
        exhaustive (bool, optional): Re-check every trial by brute force.

    Returns:
        SearchReport: Success, the best form and statistics over the trials.
    """
    if p**n > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"{p}^{n} vectors is beyond the exhaustive isotropy search")
    jobs = [(n, k, p, seed, i, exhaustive) for i in range(trials)]
    if processes > 1 and trials > 1:
        with multiprocessing.Pool(processes) as pool:
            results = pool.map(_trial, jobs)
    else:
        results = [_trial(job) for job in jobs]

    histogram: dict[str, int] = {}
    best: Optional[TrialResult] = None
    for result in results:
        key = str(result["max_isotropic_dim"])
        histogram[key] = histogram.get(key, 0) + 1
        if best is None or result["max_isotropic_dim"] < best["max_isotropic_dim"]:
            best = result
    successes = sum(1 for r in results if r["max_isotropic_dim"] < k)
    agreements = (
        sum(1 for r in results if r["brute_force_dim"] == r["max_isotropic_dim"])
        if exhaustive
        else None
    )
    logger.debug(f"{successes} of {trials} forms have no {k}-dimensional isotropic subspace")
    return SearchReport(
        n=n,
        k=k,
        p=p,
        trials=trials,
        seed=seed,
        success=successes > 0,
        successes=successes,
        best_form=best["upper"] if best is not None else None,
        best_max_isotropic_dim=best["max_isotropic_dim"] if best is not None else None,
        best_trial=best["trial"] if best is not None else None,
        histogram=dict(sorted(histogram.items(), key=lambda item: int(item[0]))),
        brute_force_agreements=agreements,
    )
