import numpy as np
import pytest

from bpexp import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, n, k=None):
    shape = (n,) if k is None else (n, k)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return request.param
