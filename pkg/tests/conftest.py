import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stabilizer_tn import oracle
from stabilizer_tn.pauli import PauliString, random_clifford

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_pauli(n, rng, hermitian=True):
    x = rng.integers(2, size=n).astype(bool)
    z = rng.integers(2, size=n).astype(bool)
    ny = int(np.count_nonzero(x & z))
    phase = ny + 2 * int(rng.integers(2)) if hermitian else int(rng.integers(4))
    return PauliString(x, z, phase)


def random_tableau(n, rng):
    return random_clifford(n, rng)


def dense(p):
    return oracle.pauli_matrix(p)
