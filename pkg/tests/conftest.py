import os

import pytest
from hypothesis import settings

from singlering.config import bundled_config
from singlering.measures import symmetric_pair

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Register the outcome of an acceptance criterion for the end-of-run summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        _CRITERIA[number] = (title, bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {k:>2}. {title}: {detail}")


@pytest.fixture(scope="session")
def figure1():
    return bundled_config().model


@pytest.fixture(scope="session")
def bern():
    return symmetric_pair(1.0)


@pytest.fixture(scope="session")
def bern2():
    return symmetric_pair(2.0)


@pytest.fixture(scope="session")
def figure1_report(figure1):
    """The n = 1000, 20-trial outlier experiment, shared by several test modules."""
    from singlering.outliers import run_experiment

    return run_experiment(figure1, 1000, 20, 0.2, 7, keep_eigenvalues=True)
