import time

import pytest

_ACCEPTANCE = []


class Criterion:
    """Times one acceptance criterion and records a single PASS/FAIL line."""

    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.checks = []
        self.start = time.perf_counter()

    def check(self, label: str, value: float, ok: bool):
        self.checks.append((label, value, bool(ok)))

    def finish(self):
        elapsed = time.perf_counter() - self.start
        self.check("runtime_s", elapsed, elapsed < self.budget)
        ok = all(c[2] for c in self.checks)
        # failing checks are marked with a leading '!'
        shown = [f"{'' if good else '!'}{lbl}={val:.3g}" for lbl, val, good in self.checks]
        line = (f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'}  {self.title}  "
                f"[{elapsed:.1f}s]  " + ", ".join(shown))
        _ACCEPTANCE.append((self.number, line))
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    made = []

    def factory(number, title, budget):
        c = Criterion(number, title, budget)
        made.append(c)
        return c

    return factory


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
