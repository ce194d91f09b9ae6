import numpy as np
import pytest

from fpk_chaos.spectral_basis import OperatorSpectrum, project_field


@pytest.fixture
def spectrum01():
    return OperatorSpectrum.build(0.1, 8)


@pytest.fixture(scope="session")
def sine_field():
    return project_field(lambda x: np.sin(np.pi * x), 32)
