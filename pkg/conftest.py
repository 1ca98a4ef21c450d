import logging
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from conelab.services.solvers import SolverConfig  # noqa: E402


@pytest.fixture
def cfg():
    """Small, deterministic solver settings for unit tests"""
    return SolverConfig(tol=1e-9, max_iter=100000, multistarts=4, seed=1, alt_iter=15, samples=2000)


@pytest.fixture(autouse=True)
def restore_root_handlers():
    # the CLI reconfigures the root logger; undo that between tests
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        if handler not in handlers:
            root.removeHandler(handler)
            handler.close()
    for handler in handlers:
        if handler not in root.handlers:
            root.addHandler(handler)
    root.setLevel(level)
