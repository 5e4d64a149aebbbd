"""Shared fixtures and the acceptance-summary reporter.

Acceptance tests record one PASS/FAIL/SKIP line per criterion; the lines are
printed in a dedicated terminal section after the run regardless of capture
settings, so `pytest tests/test_acceptance.py` always ends with one verdict
line per criterion.
"""
from __future__ import annotations

import numpy as np
import pytest

# criterion id -> (status, detail); populated by the `acceptance` fixture
_ACCEPTANCE_RESULTS = {}

# declared up front so a crashed test still yields a (MISSING) line
ACCEPTANCE_CRITERIA = (
    "1 first tabular benchmark reproduction",
    "2 second tabular benchmark reproduction",
    "3 worst-case-attribution equivalence (identity + bit-identical training)",
    "4 expected-update Monte-Carlo (zero-weight, bound, limit)",
    "5 attribution oracle equivalence (closed vs numeric)",
    "6 worst-case loss maximality over the box",
    "7 Gini index exact values and fuzz properties",
    "8 image-scale substitute: blob-image MLP sparseness ordering",
)


class AcceptanceRecorder:
    def record(self, criterion: str, status: str, detail: str = ""):
        _ACCEPTANCE_RESULTS[criterion] = (status, detail)

    def check(self, criterion: str, ok: bool, detail: str = ""):
        """Record the verdict, then assert it."""
        self.record(criterion, "PASS" if ok else "FAIL", detail)
        assert ok, f"acceptance criterion {criterion}: {detail}"

    def skip(self, criterion: str, reason: str):
        self.record(criterion, "SKIP", reason)
        pytest.skip(reason)


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in ACCEPTANCE_CRITERIA:
        status, detail = _ACCEPTANCE_RESULTS.get(criterion, ("MISSING", "no verdict recorded"))
        line = f"[{status:>4s}] criterion {criterion}"
        if detail:
            line += f" — {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
