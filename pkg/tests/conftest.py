import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from seqdisc import Ensemble

settings.register_profile(
    "seqdisc",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("seqdisc")

seeds = st.integers(min_value=0, max_value=2**63 - 1)

FIG1 = ((0.3, 0.3, 0.3), (0.3, 0.3, -0.3))
FIG2 = ((0.2, 0.3, -0.4), (-0.2, -0.3, 0.35))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fig1():
    return Ensemble.from_bloch(FIG1, (0.5, 0.5))


@pytest.fixture
def fig2():
    return Ensemble.from_bloch(FIG2, (0.5, 0.5))


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
