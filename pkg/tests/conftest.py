import numpy as np
import pytest


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_hermitian(rng, n=4):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def random_psd(rng, n=4):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return z @ z.conj().T


@pytest.fixture
def rng():
    return rng_for(20240601)
