import sys

import numpy as np
import pytest

from fracnls import GridSpec, ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid1():
    return GridSpec(1, 20.0, 256)


@pytest.fixture
def grid2():
    return GridSpec(2, 12.0, 64)


@pytest.fixture(scope="session")
def bo_params():
    return ModelParams(1, 0.5, 1.0, 1.0)


@pytest.fixture(scope="session")
def inst_params():
    return ModelParams(2, 0.8, 2.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
