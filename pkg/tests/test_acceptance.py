"""Runs every acceptance criterion at its stated tolerance, one report line each."""

import pytest

from rocgraph import acceptance


@pytest.mark.slow
@pytest.mark.parametrize("name", list(acceptance.CRITERIA))
def test_criterion(name, capsys):
    res = acceptance.run_criterion(name)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


@pytest.mark.slow
def test_determinism_negative_control(capsys):
    res = acceptance.run_criterion("determinism", perturb=True)
    with capsys.disabled():
        print("\n" + res.line())
    assert not res.passed
