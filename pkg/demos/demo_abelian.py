"""
Demo: unit groups of commutative matrix algebras, their invariant factors and
the index of Omega_1 of their p-parts.
"""

import numpy as np

import pgrl
from pgrl.abelgrp import jordan_block_family, singer_cycle
from pgrl.matalg import diagonal_algebra, polynomial_algebra


def describe(title: str, group: pgrl.FiniteMatrixGroup) -> None:
    index, ok = pgrl.omega_index_check(group)
    print()
    print(title)
    print(f"  order: {group.order}")
    print(f"  type: {pgrl.abelian_type(group)}")
    print(f"  |A : Omega_1(O_p(A))| = {index} (<= p^n: {ok})")
    print(f"  d(Phi(O_p(A))): {pgrl.d_phi(group)}")


if __name__ == "__main__":

    jordan = pgrl.Matrix(np.eye(4, k=1, dtype=np.int64), 3)
    describe(
        "units of F_3[N], N a nilpotent 4x4 Jordan block",
        pgrl.unit_group_of_algebra(polynomial_algebra(jordan)),
    )
    describe(
        "units of the diagonal algebra of 3x3 matrices over F_5",
        pgrl.unit_group_of_algebra(diagonal_algebra(3, 5)),
    )
    describe("a Singer cycle of GL(3, 2)", pgrl.FiniteMatrixGroup([singer_cycle(3, 2)]))
    describe("C_4^2 in GL(6, 2)", jordan_block_family(2, 2))
