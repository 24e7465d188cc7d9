import numpy as np
import pytest

from fbsdelab import PeriodicGrid, SolverParams


@pytest.fixture
def grid64() -> PeriodicGrid:
    return PeriodicGrid(d=1, N=64, L=2.0 * np.pi)


@pytest.fixture
def grid128() -> PeriodicGrid:
    return PeriodicGrid(d=1, N=128, L=2.0 * np.pi)


@pytest.fixture
def grid2d() -> PeriodicGrid:
    return PeriodicGrid(d=2, N=32, L=2.0 * np.pi)


@pytest.fixture
def params() -> SolverParams:
    # the reference admissible point: beta=0.25, q=3, delta=0.5, p=2.5, gamma=0.1
    return SolverParams(d=1, beta=0.25, q=3.0, delta=0.5, p=2.5, gamma=0.1, T=0.5, num_steps=32)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
