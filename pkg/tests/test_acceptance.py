"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line with measured vs expected."""

import pytest

from polepath.verify import CHECKS

RESULTS: list[str] = []


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i + 1}" for i in range(len(CHECKS))])
def test_acceptance(check):
    result = check()
    line = result.line()
    RESULTS.append(line)
    print(line)
    assert result.passed, line
