import time

import pytest

from strata.graph import explore, virtual_components
from strata.seeds import builtin_seed

# one line per acceptance criterion, printed in the terminal summary
CRITERIA: dict = {}


class Enumerated:
    def __init__(self, seed_name):
        self.seed = builtin_seed(seed_name)
        t = time.perf_counter()
        self.graph = explore([self.seed])
        self.comps = virtual_components(self.graph)
        self.seconds = time.perf_counter() - t


@pytest.fixture(scope="session")
def p81():
    return Enumerated("p81-base")


@pytest.fixture(scope="session")
def p82():
    return Enumerated("p82-mat")


@pytest.fixture
def criterion():
    def record(key, ok, detail="", expected_failure=False):
        status = ("XPASS" if ok else "xfail") if expected_failure else ("pass" if ok else "FAIL")
        CRITERIA[key] = (status, detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(k.split(".")[0]), k)):
        status, detail = CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {detail}")
