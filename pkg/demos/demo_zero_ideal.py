"""
Demo: extracting square-zero ideals from random commutative matrix algebras,
and re-checking the certificates.
"""

import logging

import numpy as np

import pgrl
from pgrl.matalg import direct_sum, polynomial_algebra
from pgrl.zeroideal import certificate_to_json


def random_algebra(rng: np.random.Generator, p: int) -> pgrl.MatAlgebra:
    # the polynomial algebra of a strictly upper triangular matrix,
    # summed with a diagonal block
    upper = pgrl.Matrix(np.triu(rng.integers(0, p, size=(4, 4)), 1), p)
    diagonal = pgrl.Matrix(np.diag(rng.integers(0, p, size=2)), p)
    return direct_sum(polynomial_algebra(upper), polynomial_algebra(diagonal))


if __name__ == "__main__":

    # optional: printing debug information
    logging.basicConfig(level=logging.DEBUG)

    rng = np.random.default_rng(2024)

    for p in (2, 3, 5):
        alg = random_algebra(rng, p)
        ideal, certificate = pgrl.extract_zero_ideal(alg)
        print()
        print(f"algebra of {alg.n}x{alg.n} matrices over F_{p}, dimension {alg.dim}")
        print(f"  dim ker(A): {certificate.k}")
        print(f"  steps: {[step['m'] for step in certificate.steps]}")
        print(f"  zero ideal of dimension {ideal.dim}, codimension {certificate.final_codim}")
        print(f"  bound n - k: {alg.n - certificate.k}")
        print(f"  certificate verified: {pgrl.verify_certificate(alg, certificate)}")
        print(f"  final checks: {certificate_to_json(alg, certificate)['checks']}")
