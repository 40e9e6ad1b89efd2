import numpy as np
import pytest

from fdstates.base import ScenarioConfig
from fdstates.model import KerrModel
from fdstates.operators import DensityMatrix, StateVector

EPS = np.pi / 50


@pytest.fixture
def eps():
    return EPS


@pytest.fixture
def rabi_model():
    return KerrModel(2, 1.0, EPS, dim=6)


@pytest.fixture
def vacuum6():
    return StateVector.vacuum(6)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_density_matrix(rng):
    def build(dim):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        rho = a @ a.conj().T
        return DensityMatrix(rho / np.trace(rho))

    return build


@pytest.fixture
def random_hermitian(rng):
    def build(dim):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        return (a + a.conj().T) / 2

    return build


@pytest.fixture
def fig1_config():
    return ScenarioConfig(
        name="fig1",
        engine="continuous",
        order=2,
        chi=1.0,
        eps=EPS,
        dim=6,
        duration=100.0,
        sample_count=101,
        target={"kind": "fd_coherent"},
    )
