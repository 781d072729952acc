import numpy as np
import pytest

from kpz_endpoint import density as dens


@pytest.fixture(scope="session")
def cfg():
    return dens.NumericsConfig()


@pytest.fixture(scope="session")
def endpoint_default(cfg):
    """Default-config EndpointTable on [-4, 4], step 0.02."""
    return dens.endpoint_table(cfg=cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
