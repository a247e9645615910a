import pytest

from deltabound import DimensionlessModel

#: Bound-state roots of the linear model with u0 = 1, gamma = 10 as published (9 decimals).
PUBLISHED_ROOTS = [
    -2.136182406,
    -3.877567571,
    -5.301530405,
    -6.557969140,
    -7.703603791,
    -8.766062952,
    -9.753634587,
]

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


@pytest.fixture
def linear_model():
    return DimensionlessModel("linear", u0=1.0, gamma=10.0)


@pytest.fixture
def parabolic_model():
    return DimensionlessModel("parabolic", u0=1.0, gamma=10.0)


@pytest.fixture
def exponential_model():
    return DimensionlessModel("exponential", u0=1.0, gamma=10.0, b=1.0)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
