import time

import pytest

_LINES: list[str] = []


class Criterion:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.start = time.perf_counter()

    def done(self, ok: bool, detail: str) -> bool:
        elapsed = time.perf_counter() - self.start
        in_time = elapsed < self.budget
        ok = bool(ok) and in_time
        line = (f"{'PASS' if ok else 'FAIL'} criterion {self.number:>2} ({self.title}): {detail}; "
                f"{elapsed:.1f}s of {self.budget:g}s")
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
