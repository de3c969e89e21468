"""The ten acceptance criteria at their stated tolerances and time limits.

Each test prints one PASS/FAIL line and asserts that the criterion passed.
The lines are also collected into a summary section at the end of the run.
"""

import pytest

from conftest import ACCEPTANCE_LINES

from monocirc import acceptance


@pytest.mark.parametrize(
    "criterion",
    acceptance.CRITERIA,
    ids=[f"{i:02d}-{fn.__name__.removeprefix('criterion_')}" for i, fn in enumerate(acceptance.CRITERIA, 1)],
)
def test_criterion(criterion):
    result = criterion()
    print(result.line())
    ACCEPTANCE_LINES.append(result.line())
    assert result.passed, result.line()
