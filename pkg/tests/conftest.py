import os

import pytest
from hypothesis import HealthCheck, settings

from sparsezeros.fields import field_of_size
from sparsezeros.laurent import series_field
from sparsezeros.parser import parse_poly, parse_series

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

E1 = "x^4 + (1+T+T^2)*x^2 + (T+T^2)*x"


@pytest.fixture(scope="session")
def K2():
    return series_field(field_of_size(2))


@pytest.fixture(scope="session")
def K3():
    return series_field(field_of_size(3))


@pytest.fixture(scope="session")
def K4():
    return series_field(field_of_size(4))


@pytest.fixture(scope="session")
def e1(K2):
    return parse_poly(E1, K2)


def ser(text, K):
    return parse_series(text, K)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
