"""One test per acceptance criterion; a PASS/FAIL line for each is printed
in the terminal summary (and immediately, when run with -s)."""
import pytest

from tihsim import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda f: f.__name__)
def test_criterion(check):
    r = check()
    line = r.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert r.ok, r.detail
    assert r.in_time, f"took {r.seconds:.1f}s, limit {r.limit}s"
