import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sqglab.spectral import SpectralField, field_from_envelope, make_grid

settings.register_profile(
    "lab",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("lab")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


def random_field(grid, seed, slope=-1.5, cutoff=None):
    cutoff = cutoff if cutoff is not None else grid.n / 6
    env = lambda k: k**slope * np.exp(-((k / cutoff) ** 2))
    return field_from_envelope(grid, env, np.random.default_rng(seed))


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64)


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128)
