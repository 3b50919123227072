import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _report_dir(tmp_path, monkeypatch):
    # command-line runs write their reports into the working directory
    monkeypatch.chdir(tmp_path)


@pytest.fixture(autouse=True)
def _quiet_boundary_warnings():
    from microyoung.errors import BoundaryWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        yield


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
