import json
from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parent / "data" / "oracles.json"

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def oracles():
    return json.loads(DATA.read_text())


@pytest.fixture(scope="session")
def record():
    """Record the verdict line of one acceptance criterion."""

    def _record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
