import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

import acceptance_report  # noqa: E402

from tsape import Dataset, TimeSeries, fit_centroid, two_class_blobs  # noqa: E402

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

MOCK_PREDICTOR = str(Path(__file__).resolve().parent / "mock_predictor.py")


def mock_command(*extra: str) -> list[str]:
    return [sys.executable, MOCK_PREDICTOR, *extra]


@pytest.fixture(scope="session")
def blobs_small():
    # well separated two-class data, small enough for fast curve tests
    return two_class_blobs(per_class=6, length=16, centers=(0.0, 1.0), noise=0.1, seed=3)


@pytest.fixture(scope="session")
def centroid_small(blobs_small):
    # tau large enough that probabilities stay strictly inside (0, 1)
    return fit_centroid(blobs_small, temperature=4.0)


@pytest.fixture()
def tiny_dataset():
    return Dataset.from_instances(
        "tiny",
        2,
        [
            TimeSeries(id="a", values=[0.0, 0.0, 0.0, 0.0], label=0),
            TimeSeries(id="b", values=[0.1, -0.1, 0.0, 0.1], label=0),
            TimeSeries(id="c", values=[1.0, 1.0, 1.0, 1.0], label=1),
            TimeSeries(id="d", values=[0.9, 1.1, 1.0, 0.9], label=1),
        ],
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.LINES:
            terminalreporter.write_line(line)
