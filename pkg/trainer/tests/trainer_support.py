"""Shared markers for the trainer test suite."""

import shutil

import pytest


def solver_cli_available() -> bool:
    return shutil.which("gnls") is not None


requires_solver = pytest.mark.skipif(not solver_cli_available(),
                                     reason="solver CLI not installed")
