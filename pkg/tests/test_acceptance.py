"""Acceptance criteria, asserted at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are collected and
repeated in the terminal summary by ``conftest.py``.
"""

from __future__ import annotations

import pytest

from kdivlab.acceptance import CRITERIA, load_golden, run_criterion, summary_line

SUMMARY: list[str] = []


@pytest.fixture(scope="module")
def golden():
    return load_golden()


@pytest.mark.parametrize("number", [c.number for c in CRITERIA],
                         ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(number, golden):
    rep = run_criterion(number, golden)
    line = summary_line(rep)
    SUMMARY.append(line)
    print(line)
    assert rep.checks, "criterion produced no checks"
    failed = [f"{c.name}: value={c.value!r} expected={c.expected!r} tol={c.tol!r}"
              for c in rep.failures()]
    assert not failed, "\n".join(failed)
