import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []


def _line(number: int, ok: bool, title: str, detail: str = "") -> str:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    return f"{line}  [{detail}]" if detail else line


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion, then assert it.

    Tests are named ``test_criterion_NN_...``; one that raises before
    reaching its verdict still gets a FAIL line.
    """
    done = []

    def record(title: str, ok: bool, detail: str = ""):
        number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
        line = _line(number, ok, title, detail)
        ACCEPTANCE_LINES.append(line)
        done.append(line)
        print(line)
        assert ok, line

    yield record
    if not done:
        number = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
        ACCEPTANCE_LINES.append(_line(number, False, request.node.name, "raised before verdict"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
