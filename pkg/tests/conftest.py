import pytest

from physics.model import WaveguideModel, resonant_energy
from services.quadrature import QuadratureConfig

SPACING = 5.0


@pytest.fixture
def model():
    return WaveguideModel(m=1.0, gamma=0.1)


@pytest.fixture
def quad():
    return QuadratureConfig()


@pytest.fixture
def d():
    return SPACING


@pytest.fixture
def E1(model):
    return resonant_energy(model, SPACING, 1)


@pytest.fixture
def E2(model):
    return resonant_energy(model, SPACING, 2)
