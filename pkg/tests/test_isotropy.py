import numpy as np
import pytest

from pgrl.core import ShapeError, TooLarge
from pgrl.exactla import Subspace
from pgrl.isotropy import (brute_force_max_isotropic_dim, form_eval,
                           is_totally_isotropic, max_isotropic_dim,
                           orthogonal_space, random_form_search)
from pgrl.nilring import VectorForm, lift_form, random_form


@pytest.mark.parametrize("p, m", [(2, 1), (2, 2), (3, 2), (5, 1)])
def test_symplectic(p: int, m: int) -> None:
    form = VectorForm.symplectic(p, m)
    dim, witness = max_isotropic_dim(form)
    assert dim == m
    assert witness.dim == m
    assert is_totally_isotropic(form, witness)


@pytest.mark.parametrize("p, n", [(2, 1), (2, 4), (3, 3)])
def test_zero_form(p: int, n: int) -> None:
    dim, witness = max_isotropic_dim(VectorForm.zero(p, 1, n, 2))
    assert dim == n
    assert witness.is_full()


def test_limits() -> None:
    with pytest.raises(TooLarge):
        max_isotropic_dim(VectorForm.zero(2, 1, 25, 1))
    with pytest.raises(TooLarge):
        random_form_search(25, 1, 2, trials=1, seed=0)
    with pytest.raises(ShapeError):
        max_isotropic_dim(lift_form(VectorForm.symplectic(2, 1), 2))


def test_isotropy_predicates() -> None:
    form = VectorForm.symplectic(3, 2)
    assert form_eval(form, np.array([1, 0, 0, 0]), np.array([0, 1, 0, 0])).tolist() == [1]
    assert form_eval(form, np.array([0, 1, 0, 0]), np.array([1, 0, 0, 0])).tolist() == [2]
    assert is_totally_isotropic(form, Subspace([[1, 0, 0, 0], [0, 0, 1, 0]], 4, 3))
    assert not is_totally_isotropic(form, Subspace([[1, 0, 0, 0], [0, 1, 0, 0]], 4, 3))
    assert is_totally_isotropic(form, Subspace([[1, 2, 0, 1]], 4, 3))
    with pytest.raises(ShapeError):
        is_totally_isotropic(form, Subspace.full(3, 3))

    line = Subspace([[1, 0, 0, 0]], 4, 3)
    perp = orthogonal_space(form, line)
    assert perp == Subspace([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 4, 3)
    assert orthogonal_space(form, Subspace.zero(4, 3)).is_full()


def test_search_matches_brute_force(rng: np.random.Generator) -> None:
    cases = [(2, 4, 1), (2, 4, 2), (2, 5, 2), (3, 3, 1), (3, 4, 2), (2, 3, 3)]
    for trial in range(120):
        p, n, k = cases[trial % len(cases)]
        form = random_form(p, 1, n, k, rng)
        dim, witness = max_isotropic_dim(form)
        assert dim == brute_force_max_isotropic_dim(form)[0], form.upper.tolist()
        assert witness.dim == dim
        assert is_totally_isotropic(form, witness)


def test_random_form_search_is_deterministic() -> None:
    first = random_form_search(4, 3, 2, trials=20, seed=7)
    second = random_form_search(4, 3, 2, trials=20, seed=7)
    assert first == second
    assert sum(first["histogram"].values()) == 20
    assert first["brute_force_agreements"] is None
    assert first["success"] == (first["successes"] > 0)
    assert first["best_max_isotropic_dim"] == min(int(d) for d in first["histogram"])


def test_random_form_search_exhaustive() -> None:
    report = random_form_search(4, 2, 2, trials=10, seed=3, exhaustive=True)
    assert report["brute_force_agreements"] == 10


def test_random_form_search_processes() -> None:
    serial = random_form_search(4, 2, 3, trials=6, seed=11)
    parallel = random_form_search(4, 2, 3, trials=6, seed=11, processes=2)
    assert serial == parallel


def test_no_trials() -> None:
    report = random_form_search(3, 1, 2, trials=0, seed=0)
    assert not report["success"]
    assert report["best_form"] is None
    assert report["histogram"] == {}


@pytest.mark.slow
def test_random_form_search_p3_n5() -> None:
    report = random_form_search(5, 3, 3, trials=30, seed=1, exhaustive=True)
    assert report["brute_force_agreements"] == 30
