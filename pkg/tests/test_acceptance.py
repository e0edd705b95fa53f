"""The ten acceptance criteria at the full profile, one pass/fail line each."""

import pytest

from milnorwitt import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion, capsys):
    res = criterion("full", acceptance.DEFAULT_SEED)
    with capsys.disabled():
        print("\n" + res.line())
        for msg in res.failures[:5]:
            print("    " + msg)
    assert res.ok, "; ".join(res.failures[:5])
    assert res.seconds <= res.budget
