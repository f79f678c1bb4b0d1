"""Shared fixtures and the acceptance summary printer."""

from __future__ import annotations

import pytest

# criterion number -> (title, passed, detail)
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


class Recorder:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.failures: list[str] = []
        self.details: list[str] = []

    def note(self, text):
        self.details.append(text)

    def check(self, ok, message):
        """Record one sub-check; the criterion passes only if all of them do."""
        if not ok:
            self.failures.append(message)
        return ok

    def finish(self):
        passed = not self.failures
        detail = "; ".join(self.failures if self.failures else self.details)
        ACCEPTANCE_RESULTS[self.number] = (self.title, passed, detail)
        assert passed, detail


@pytest.fixture
def criterion():
    """Factory: ``rec = criterion(3, "title")``, then ``rec.check(...)`` and ``rec.finish()``."""
    made = []

    def make(number, title):
        rec = Recorder(number, title)
        made.append(rec)
        return rec

    yield make
    for rec in made:
        if rec.number not in ACCEPTANCE_RESULTS:
            # Test errored before finishing.
            ACCEPTANCE_RESULTS[rec.number] = (rec.title, False, "did not complete")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  [{k:2d}] {title}: {detail}")
