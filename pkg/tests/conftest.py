import functools

import pytest
from hypothesis import HealthCheck, settings

from sfkahler.families import build_family

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def family(name, **params):
    return build_family(name, **params)


def fam(name, **params):
    return family(name, **params)


@pytest.fixture(scope="session")
def flat():
    return fam("flat_c2")


@pytest.fixture(scope="session")
def burns():
    return fam("lebrun_instanton", k=1, m=1.0)


@pytest.fixture(scope="session")
def eguchi_hanson():
    return fam("lebrun_instanton", k=2, m=1.0)


@pytest.fixture(scope="session")
def instanton3():
    return fam("lebrun_instanton", k=3, m=1.0)


@pytest.fixture(scope="session")
def s2h2():
    return fam("s2_h2", case="hyperbolic", field="theta2")


@pytest.fixture(scope="session")
def s2h2_combined():
    return fam("s2_h2", case="hyperbolic", field="combined")


# one verdict line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
