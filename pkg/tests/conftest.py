import numpy as np
import pytest

from movingframe.spaces import SpatialGrid, TimeGrid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_grid():
    return TimeGrid(1.0, 64)


@pytest.fixture
def line():
    return SpatialGrid(-12.0, 4.0, 1.0 / 16)


_ACCEPTANCE = pytest.StashKey()


@pytest.fixture(scope="session")
def criterion_log(request):
    """Collects one summary line per acceptance criterion."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
