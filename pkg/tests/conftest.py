import sys

import numpy as np
import pytest
from hypothesis import settings

from entangle import make_state
from entangle.samples import singlet

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SQ = np.sqrt


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def singlet_state():
    return singlet()


@pytest.fixture
def weighted_state():
    """``sqrt(0.7)|00> + sqrt(0.3)|11>``."""
    return make_state(np.diag([SQ(0.7), SQ(0.3)]))


@pytest.fixture
def product00():
    return make_state(np.array([[1.0, 0.0], [0.0, 0.0]]))


def up_to_phase(u, v) -> float:
    """``1 - |<u, v>|`` for unit vectors."""
    return 1.0 - abs(np.vdot(u, v))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
