import numpy as np
import pytest

from ardc import _kernels

BACKENDS = _kernels.backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    mod = BACKENDS[request.param]
    monkeypatch.setattr(_kernels, "defect_loop", mod.defect_loop)
    monkeypatch.setattr(_kernels, "barycentric", mod.barycentric)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
