import numpy as np
import pytest

from qectg import DistributedDecoder, GatedDecoder, build_lattice
from qectg.harness import generate_dataset


@pytest.fixture(scope="session")
def lat3():
    return build_lattice(3)


@pytest.fixture(scope="session")
def lat5():
    return build_lattice(5)


@pytest.fixture(scope="session")
def lattices():
    return {d: build_lattice(d) for d in (3, 5, 7, 9)}


@pytest.fixture(scope="session")
def d5_dataset(lat5):
    """Shared small training set; big enough for meaningful nets."""
    return generate_dataset(lat5, 0.1, 60000, seed=7)


@pytest.fixture(scope="session")
def d5_distributed(d5_dataset):
    return DistributedDecoder(distance=5, epochs=12, seed=3).fit(
        d5_dataset.syndromes, d5_dataset.classes
    )


@pytest.fixture(scope="session")
def d5_gated(d5_dataset):
    return GatedDecoder(distance=5, epochs=12, seed=3).fit(
        d5_dataset.syndromes, d5_dataset.classes
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240810)
