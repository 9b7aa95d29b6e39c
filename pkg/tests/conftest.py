from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from merocurve import Context, MeroPoly, parse

settings.register_profile(
    "repo",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@pytest.fixture
def ctx():
    with Context() as c:
        yield c


def P(text: str) -> MeroPoly:
    return parse(text)


def Q(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
