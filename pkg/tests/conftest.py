import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from krflow.grid import RadialGrid  # noqa: E402
from krflow.presets import preset_metric  # noqa: E402


@pytest.fixture(scope="session")
def grid_1024():
    return RadialGrid.logspace(1e-6, 1e6, 1024)


@pytest.fixture(scope="session")
def grid_2048():
    return RadialGrid.logspace(1e-6, 1e6, 2048)


@pytest.fixture(scope="session")
def cigar(grid_2048):
    return preset_metric("cigar", {}, grid_2048, n=2)


@pytest.fixture(scope="session")
def conoid(grid_2048):
    return preset_metric("conoid", {"beta": 0.5}, grid_2048, n=2)


@pytest.fixture(scope="session")
def euclidean(grid_1024):
    return preset_metric("euclidean", {}, grid_1024, n=2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
