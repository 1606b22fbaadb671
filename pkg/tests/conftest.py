import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lwsense import preset_dataset  # noqa: E402

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def ir20():
    return preset_dataset("ir20", seed=0)


@pytest.fixture(scope="session")
def tiny():
    """One subject, three repetitions: 24 traces."""
    return preset_dataset("ir20", seed=3, subjects=2, reps=3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: (int(s.rstrip("abc")), s)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
