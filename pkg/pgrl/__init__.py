"""
pgrl: exact computations on finite p-groups, commutative matrix algebras and
alternating forms over finite fields.

This package provides exact linear algebra over F_p, matrix algebras and the
extraction of square-zero ideals with checkable certificates, abelian matrix
groups and their invariants, the class 2 groups built from alternating forms,
the search for totally isotropic subspaces, and builders of explicit p-groups
checked against rank bounds.
"""

import importlib.metadata

from .abelgrp import (FiniteAbelianType, FiniteMatrixGroup, abelian_type,
                      d_phi, enumerate_elements, mho_t, o_p_part, omega_index_check,
                      omega_t, unit_group_of_algebra, verbal_w_index)
from .core import PgrlError, Settings
from .exactla import (Matrix, PrimeModulus, Subspace, codim, kernel, preimage,
                      rank, rref, subspace_contains, subspace_intersect,
                      subspace_sum)
from .isotropy import (is_totally_isotropic, max_isotropic_dim,
                       random_form_search)
from .matalg import (MatAlgebra, algebra_square, common_kernel,
                     generate_algebra, image_of_vector, is_commutative,
                     is_ideal)
from .nilring import (GroupElement, NilRingElement, VectorForm, commutator,
                      group_inv, group_mul, group_pow, lift_form,
                      quotient_type_check, reduce_mod_p, ring_mul)
from .verifier import (bound_table, build_d16_power_evidence,
                       build_example_semidirect, build_pattern_group,
                       sanity_suite, small_group_ranks, sylow_frattini_check)
from .zeroideal import (ZeroIdealCertificate, extract_zero_ideal,
                        verify_certificate)

__version__ = importlib.metadata.version("pgrl")
