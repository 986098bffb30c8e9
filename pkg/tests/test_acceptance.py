"""Acceptance suite: every exit criterion at its stated tolerance.

Each criterion prints its own pass/fail line; run with `pytest -s` (or see
`curvepulse accept`) for the table.
"""

import pytest

from curvepulse.acceptance import ALL_CRITERIA


@pytest.mark.parametrize("criterion_fn", ALL_CRITERIA,
                         ids=[fn.__name__ for fn in ALL_CRITERIA])
def test_criterion(criterion_fn):
    result = criterion_fn()
    print(result.line)
    assert result.passed, result.line
