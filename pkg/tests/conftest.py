import time
from contextlib import contextmanager

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Time a criterion against its budget and log one PASS/FAIL line."""

    @contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            elapsed = time.perf_counter() - start
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget:g}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            ACCEPTANCE_LINES.append(
                f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}  ({elapsed:.2f}s / {budget:g}s)"
            )

    return run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
