import numpy as np
import pytest

from brlab import models


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def torus1d():
    return models.torus_model(1, 16, 64)


@pytest.fixture(scope="session")
def interval():
    return models.interval_dirichlet_model(16, 65)


@pytest.fixture(scope="session")
def hermite1d():
    return models.hermite_model(1, 32, 12.0, 200)


@pytest.fixture
def verdict(capsys):
    """Print one ``PASS``/``FAIL`` line for a criterion, bypassing capture."""
    def emit(name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok
    return emit
