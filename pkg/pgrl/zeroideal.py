"""
Square-zero ideals of commutative matrix algebras.

Let A be a commutative algebra of n x n matrices over F_p with
k = dim ker(A). extract_zero_ideal returns an ideal B of A with B^2 = 0 and
codim(B, A) <= n - k. It starts from A_0 = A; while A_i^2 does not annihilate
F_p^n it picks the first standard basis vector x outside ker(A_i^2), sets
U_i = ker(A_i), V_i = A_i(x) and shrinks A_i to the preimage of U_i & V_i under
a -> a(x). Every step strictly raises codim(A_i, A) and dim ker(A_i) by the same
amount m_i, which bounds the number of steps by n - k.

Each run produces a certificate (the trace of the iteration plus the output
ideal) which verify_certificate re-checks without re-running the extraction.
With k = 0 this gives the weaker statement: a zero subalgebra of codimension at
most n.
"""

from dataclasses import dataclass, field
from typing import Any, Optional, TypedDict

import numpy as np

from .core import (InternalInvariantViolation, NonCommutativeInput,
                   NotASubspace, NotClosedInput, ParseError, logger)
from .exactla import (Matrix, Subspace, _mod_matmul, codim,
                      enumerate_subspaces, preimage, subspace_intersect,
                      subspace_sum)
from .matalg import (MatAlgebra, algebra_square, common_kernel,
                     image_of_vector, is_commutative, is_ideal)


class StepRecord(TypedDict):
    """
    One shrinking step of the extraction.

    Attributes:
        i (int): Step index.
        l (int): codim(A_i, A) before the step.
        x_index (int): Index j of the chosen standard basis vector e_j.
        m (int): codim(U_i & V_i, V_i), the amount A_i shrinks by.
        dim_ker (int): dim ker(A_i).
    """

    i: int
    l: int
    x_index: int
    m: int
    dim_ker: int


@dataclass
class ZeroIdealCertificate:
    """
    The trace of an extraction and its output ideal.

    Attributes:
        steps (list[StepRecord]): One record per shrinking step.
        output_basis (MatAlgebra): The ideal B.
        k (int): dim ker(A).
        final_codim (int): codim(B, A).
    """

    steps: list[StepRecord] = field(default_factory=list)
    output_basis: Optional[MatAlgebra] = None
    k: int = 0
    final_codim: int = 0


def is_square_zero(alg: MatAlgebra) -> bool:
    return alg.dim == 0 or not alg.products().any()


def _first_outside(sub: Subspace) -> int:
    # a proper subspace misses some standard basis vector
    for j in range(sub.ambient_dim):
        e = np.zeros(sub.ambient_dim, dtype=np.int64)
        e[j] = 1
        if not sub.contains(e):
            return j
    raise InternalInvariantViolation("a proper subspace contains every e_j")


def _evaluation_map(alg: MatAlgebra, x: np.ndarray) -> Matrix:
    # phi_x: coefficients c -> sum c_t b_t(x), as an n x dim(alg) matrix
    images = _mod_matmul(alg.basis_array, x, alg.p)
    return Matrix(images.T, alg.p)


def _shrink(alg: MatAlgebra, coefficients: Subspace) -> MatAlgebra:
    space = Subspace(
        _mod_matmul(coefficients.basis, alg.space.basis, alg.p)
        if coefficients.dim
        else None,
        alg.n**2,
        alg.p,
    )
    return MatAlgebra(space, alg.n, check_closed=False)


def _violation(message: str) -> InternalInvariantViolation:
    logger.debug(f"invariant violated: {message}")
    return InternalInvariantViolation(message)


def extract_zero_ideal(alg: MatAlgebra) -> tuple[MatAlgebra, ZeroIdealCertificate]:
    """
    Extract an ideal B of a commutative algebra A with B^2 = 0 and
    codim(B, A) <= n - dim ker(A).

    Args:
        alg (MatAlgebra): A commutative, multiplication-closed algebra.

    Returns:
        tuple[MatAlgebra, ZeroIdealCertificate]: B and the certificate of the run.

    Raises:
        NonCommutativeInput: If alg is not commutative.
        NotClosedInput: If alg is not closed under multiplication.
        InternalInvariantViolation: If a step invariant fails (a bug trap).
    """
    if not alg.is_closed():
        raise NotClosedInput(f"{alg} is not closed under multiplication")
    if not is_commutative(alg):
        raise NonCommutativeInput(f"{alg} is not commutative")

    n, p = alg.n, alg.p
    k = common_kernel(alg).dim
    logger.debug(f"extracting a zero ideal from {alg}, dim ker = {k}")

    steps: list[StepRecord] = []
    current = alg
    level = 0
    while True:
        square_kernel = common_kernel(algebra_square(current))
        if square_kernel.is_full():
            break
        if len(steps) > n - k:
            raise _violation(f"more than n - k = {n - k} shrinking steps")

        j = _first_outside(square_kernel)
        x = np.zeros(n, dtype=np.int64)
        x[j] = 1
        u = common_kernel(current)
        v = image_of_vector(current, x)
        w = subspace_intersect(u, v)
        m = codim(w, v)
        record = StepRecord(i=len(steps), l=level, x_index=j, m=m, dim_ker=u.dim)
        logger.debug(f"step {record}")

        if m < 1:
            raise _violation(f"step {record['i']}: m = {m}, expected >= 1")
        if u.dim < level + k:
            raise _violation(
                f"step {record['i']}: dim ker = {u.dim} < l + k = {level + k}"
            )

        shrunk = _shrink(current, preimage(_evaluation_map(current, x), w))
        if codim(shrunk.space, current.space) != m:
            raise _violation(f"step {record['i']}: the algebra did not shrink by {m}")
        shrunk_kernel = common_kernel(shrunk)
        if not subspace_sum(u, v).is_subspace_of(shrunk_kernel):
            raise _violation(f"step {record['i']}: U + V is not in the new kernel")
        if shrunk_kernel.dim < u.dim + m:
            raise _violation(f"step {record['i']}: the kernel grew by less than {m}")
        if not is_ideal(shrunk, alg):
            raise _violation(f"step {record['i']}: A_(i+1) is not an ideal of A")

        steps.append(record)
        level += m
        current = shrunk

    final_codim = codim(current.space, alg.space)
    if final_codim != level or final_codim > n - k:
        raise _violation(f"final codimension {final_codim} (sum of steps {level})")
    logger.debug(f"zero ideal of dimension {current.dim}, codimension {final_codim}")
    return current, ZeroIdealCertificate(
        steps=steps, output_basis=current, k=k, final_codim=final_codim
    )


def verify_certificate(alg: MatAlgebra, cert: ZeroIdealCertificate) -> bool:
    """
    Independently re-check a certificate against its input algebra: every step
    record invariant, the ideal property, B^2 = 0 and the codimension bound.
    """
    n = alg.n
    ideal = cert.output_basis
    if ideal is None or ideal.n != n or ideal.p != alg.p:
        return False
    if cert.k != common_kernel(alg).dim:
        return False
    k = cert.k

    level = 0
    for index, step in enumerate(cert.steps):
        if step["i"] != index or step["l"] != level:
            return False
        if step["m"] < 1 or step["dim_ker"] < level + k:
            return False
        if not 0 <= step["x_index"] < n:
            return False
        level += step["m"]
    if len(cert.steps) > n - k:
        return False

    try:
        actual = codim(ideal.space, alg.space)
    except NotASubspace:
        return False
    if actual != cert.final_codim or actual != level or actual > n - k:
        return False
    if not ideal.is_closed() or not is_ideal(ideal, alg):
        return False
    return is_square_zero(ideal)


def brute_force_zero_ideal(alg: MatAlgebra) -> MatAlgebra:
    """
    A square-zero ideal of maximum dimension, found by trying every subspace of
    the algebra from the largest dimension down. Exponential: desk scale only.
    """
    d = alg.dim
    for dim in range(d, -1, -1):
        for coefficients in enumerate_subspaces(d, alg.p, dim):
            candidate = _shrink(alg, coefficients)
            if candidate.is_closed() and is_square_zero(candidate) and is_ideal(
                candidate, alg
            ):
                return candidate
    raise InternalInvariantViolation("the zero ideal was not found")


def certificate_to_json(alg: MatAlgebra, cert: ZeroIdealCertificate) -> dict[str, Any]:
    """
    The JSON form of a certificate, including both bases and the final checks.
    """
    ideal = cert.output_basis if cert.output_basis is not None else MatAlgebra.zero(
        alg.n, alg.p
    )
    return {
        "n": alg.n,
        "p": alg.p,
        "dim_A": alg.dim,
        "k": cert.k,
        "steps": [dict(step) for step in cert.steps],
        "dim_B": ideal.dim,
        "codim": cert.final_codim,
        "checks": {
            "ideal": is_ideal(ideal, alg),
            "square_zero": is_square_zero(ideal),
            "bound": cert.final_codim <= alg.n - cert.k,
        },
        "A_basis": [m.tolist() for m in alg.basis],
        "B_basis": [m.tolist() for m in ideal.basis],
    }


def certificate_from_json(
    payload: dict[str, Any],
) -> tuple[MatAlgebra, ZeroIdealCertificate]:
    """
    Rebuild the algebra and certificate stored by certificate_to_json.

    Raises:
        ParseError: If the payload is malformed or its bases are not algebras.
    """
    try:
        n, p = int(payload["n"]), int(payload["p"])
        alg = MatAlgebra.span([Matrix(b, p) for b in payload["A_basis"]], n, p)
        ideal_matrices = [Matrix(b, p) for b in payload["B_basis"]]
        ideal = MatAlgebra(
            Subspace([m.vectorize() for m in ideal_matrices] or None, n * n, p),
            n,
            check_closed=False,
        )
        steps = [
            StepRecord(
                i=int(s["i"]),
                l=int(s["l"]),
                x_index=int(s["x_index"]),
                m=int(s["m"]),
                dim_ker=int(s["dim_ker"]),
            )
            for s in payload["steps"]
        ]
        cert = ZeroIdealCertificate(
            steps=steps,
            output_basis=ideal,
            k=int(payload["k"]),
            final_codim=int(payload["codim"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, NotClosedInput):
            raise ParseError(f"certificate algebra is not closed: {e}")
        raise ParseError(f"malformed certificate: {e}")
    return alg, cert
