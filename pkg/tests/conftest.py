import numpy as np
import pytest

from qdisk import quantum_disk_weights


@pytest.fixture
def w2():
    """Quantum-disk weights, mu = 1, normalization satisfying all conditions."""
    return quantum_disk_weights(1.0, 2.0)


@pytest.fixture
def w1():
    """Quantum-disk weights, mu = 1, commutator normalization (scale = 1)."""
    return quantum_disk_weights(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
