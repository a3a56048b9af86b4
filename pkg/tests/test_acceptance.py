"""The ten acceptance criteria, one test each; every test prints a pass/fail line."""
import pytest

from vecpcpp import selftest


@pytest.mark.parametrize("number", sorted(selftest.CRITERIA))
def test_criterion(number, capsys):
    result = selftest.run_criterion(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
