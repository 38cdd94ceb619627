import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import acceptance_report  # noqa: E402

SAMPLE_MODELS = str(Path(__file__).resolve().parent / "sample_models.py")


def model_spec(name: str) -> str:
    return f"{SAMPLE_MODELS}:{name}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.LINES:
            terminalreporter.write_line(line)
