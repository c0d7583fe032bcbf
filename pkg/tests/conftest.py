import numpy as np
import pytest

from sppca import _kernels

BACKENDS = [pytest.param(_kernels.python_backend, id="python")]
if _kernels.compiled_backend is not None:
    BACKENDS.insert(0, pytest.param(_kernels.compiled_backend, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def np_rng():
    # test-side randomness for building instances; library code never sees it
    return np.random.default_rng(20240611)
