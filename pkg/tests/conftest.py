import tempfile
from pathlib import Path
from typing import Callable, Generator

import numpy as np
import pytest

from pgrl.core import Settings
from pgrl.exactla import Matrix
from pgrl.matalg import MatAlgebra, direct_sum, polynomial_algebra


@pytest.fixture
def tmp_dir(request, scope="function") -> Generator[Path, None, None]:
    """
    Fixture yielding a temp directory.
    """
    folder_ = tempfile.TemporaryDirectory()
    folder = Path(folder_.name)
    try:
        yield folder
    finally:
        folder_.cleanup()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture(autouse=True)
def restore_settings() -> Generator[None, None, None]:
    """
    Settings are class attributes: undo what a test (or the CLI) changed.
    """
    saved = {key: getattr(Settings, key) for key in Settings._keys}
    try:
        yield
    finally:
        for key, value in saved.items():
            setattr(Settings, key, value)


def random_commutative_algebra(
    rng: np.random.Generator, p: int, max_n: int
) -> MatAlgebra:
    """
    F_p[m] for a random matrix m, or the direct sum of two of them.
    """
    if max_n >= 2 and rng.random() < 0.3:
        n1 = int(rng.integers(1, max_n))
        n2 = int(rng.integers(1, max_n - n1 + 1))
        return direct_sum(
            polynomial_algebra(Matrix.random(n1, n1, p, rng)),
            polynomial_algebra(Matrix.random(n2, n2, p, rng)),
        )
    n = int(rng.integers(1, max_n + 1))
    m = Matrix.random(n, n, p, rng)
    if rng.random() < 0.5:
        # strictly upper triangular part: a nilpotent generator
        m = Matrix(np.triu(m.data, 1), p)
    return polynomial_algebra(m)


@pytest.fixture
def commutative_algebra() -> Callable[[np.random.Generator, int, int], MatAlgebra]:
    return random_commutative_algebra
