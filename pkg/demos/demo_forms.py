"""
Demo: the class two group of an alternating form, and a random search for
forms without large totally isotropic subspaces. The search trials run in
a process pool.
"""

import numpy as np

import pgrl
from pgrl.nilring import random_element, random_form


if __name__ == "__main__":

    rng = np.random.default_rng(7)
    form = random_form(2, 2, 4, 2, rng)
    print(f"{form}: group of order 2^{2 * (form.n + form.k)}")

    g = random_element(form, rng)
    h = random_element(form, rng)
    c = pgrl.commutator(g, h, form)
    print(f"  g = {g}")
    print(f"  h = {h}")
    print(f"  [g, h] = {c} (central: {not c.s.a.any()})")
    print(f"  g^4 = {pgrl.group_pow(g, 4, form)}")
    print(f"  G/N homocyclic: {pgrl.quotient_type_check(form)}")

    dim, witness = pgrl.max_isotropic_dim(form.reduced())
    print(f"  max isotropic dimension of the reduced form: {dim}")
    print(f"  witness: {witness.basis.tolist()}")

    print()
    report = pgrl.random_form_search(n=5, k=3, p=2, trials=200, seed=11, processes=4)
    print(f"forms F_2^5 x F_2^5 -> F_2^3, {report['trials']} trials")
    print(f"  histogram of max isotropic dimensions: {report['histogram']}")
    print(f"  some form has no 3-dimensional isotropic subspace: {report['success']}")
