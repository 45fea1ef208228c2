"""PyTest configuration and test fixtures."""

import numpy as np
import pytest

from schottky.index import Index
from schottky.riemann import RiemannMatrix
from schottky.storages import MemoryStorage
from schottky.zoo import genus4_family


def pytest_addoption(parser):
    """Register the --runslow option."""
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run slow numerical acceptance tests",
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow tests unless --runslow is given."""
    if config.getoption("--runslow"):
        return

    skip_slow = pytest.mark.skip(reason="needs --runslow option to run")

    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def random_riemann_matrix(rng, g, scale=0.2):
    """Return a random Riemann matrix with Im B close to the identity."""
    X = rng.uniform(-0.5, 0.5, (g, g))
    Y = rng.uniform(-scale, scale, (g, g))
    Y = 0.5 * (Y + Y.T) + np.eye(g)

    return RiemannMatrix(0.5 * (X + X.T) + 1j * Y)


class MemoryStorageWithCounters(MemoryStorage):  # pragma: no cover
    """MemoryStorage with counters for read/write ops."""

    def __init__(self):
        """Init a MemoryStorage instance."""
        super().__init__()
        self.read_count = 0
        self.write_count = 0

    def read(self):
        """Read with counter."""
        self.read_count += 1
        return super().read()

    def write(self, document):
        """Write with counter."""
        self.write_count += 1
        return super().write(document)


@pytest.fixture
def rng():
    """Return a seeded numpy Generator."""
    return np.random.default_rng(20240607)


@pytest.fixture
def index():
    """Return a fresh lattice Index."""
    return Index()


@pytest.fixture
def identity_matrix():
    """Return a factory of i·I_g."""

    def make(g):
        return RiemannMatrix(1j * np.eye(g))

    return make


@pytest.fixture
def rm_tau():
    """Return the exact genus-4 matrix Rm_τ at τ = 1 + i."""
    return genus4_family(1 + 1j)


@pytest.fixture
def random_matrix(rng):
    """Return a factory of random Riemann matrices."""

    def make(g, scale=0.2):
        return random_riemann_matrix(rng, g, scale)

    return make


@pytest.fixture
def mem_storage_with_counters():
    """Return a MemoryStorage class with counters for read/write."""
    return MemoryStorageWithCounters
