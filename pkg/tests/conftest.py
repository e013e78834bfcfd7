import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gnls.instance import generate_instance

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_weights() -> Path:
    return FIXTURES / "selector-tiny.gnnw"


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def small_instance():
    return generate_instance(0, 20, "central", (1, 10), 30)


@pytest.fixture
def medium_instance():
    return generate_instance(1, 60, "random", (1, 10), 50)
