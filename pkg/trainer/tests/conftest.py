import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from trainer_support import solver_cli_available


@pytest.fixture(scope="session")
def mini_dataset(tmp_path_factory):
    """Small on-disk dataset built through the solver CLI (8 x n=12)."""
    if not solver_cli_available():
        pytest.skip("solver CLI not installed")
    from gnls_trainer import build_dataset

    root = tmp_path_factory.mktemp("mini-data")
    build_dataset(count=8, n=12, seed=100, out_dir=root, oracle_budget=2000,
                  workers=4)
    return root
