"""Acceptance criteria, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line.  The Monte Carlo budget follows
``LEVY_DRAWDOWN_SUITE`` (``full`` by default, ``fast`` for a quick pass).
"""

import os

import pytest

from levy_drawdown.acceptance import CHECKS, run_check

SUITE = os.environ.get("LEVY_DRAWDOWN_SUITE", "full")
_lines: list[str] = []


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CHECKS), ids=lambda n: f"c{n:02d}")
def test_criterion(number, capsys):
    res = run_check(number, SUITE)
    _lines.append(res.line())
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail


def teardown_module(module):
    if _lines:
        print(f"\nacceptance summary ({SUITE} suite)")
        for line in _lines:
            print(line)
