import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title)`` returns a
    callable taking the measured detail string."""
    def register(number, title):
        key = (number, title)
        _CRITERIA[key] = ["FAIL", "did not finish"]

        def done(detail, ok=True):
            _CRITERIA[key] = ["PASS" if ok else "FAIL", detail]
            print(f"[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
            return ok
        return done
    return register


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (status, detail) in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"{number:>2}. {status}  {title}: {detail}")
