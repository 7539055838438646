import contextlib
import time

import pytest

_LINES = []


class Criterion:
    """Times one acceptance criterion and records a PASS/FAIL line."""

    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    @contextlib.contextmanager
    def run(self):
        t0 = time.perf_counter()
        ok = False
        try:
            yield self
            ok = True
        finally:
            elapsed = time.perf_counter() - t0
            in_time = elapsed < self.limit
            status = "PASS" if ok and in_time else "FAIL"
            extra = "" if in_time else " (over time limit)"
            detail = "; ".join(self.notes)
            line = (f"[criterion {self.number:2d}] {status} {self.title}: "
                    f"{elapsed:.1f}s of {self.limit:.0f}s{extra}" + (f" | {detail}" if detail else ""))
            _LINES.append(line)
            print(line)
        assert elapsed < self.limit, f"criterion {self.number} took {elapsed:.1f}s"


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
