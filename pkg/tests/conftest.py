import numpy as np
import pytest

from mrlsmooth import _backend


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run the test once per importable backend."""
    prev = _backend.core
    _backend.use(request.param)
    yield request.param
    _backend.core = prev


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
