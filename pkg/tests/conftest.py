import numpy as np
import pytest

from qchar import make_base, parse_poly
from qchar.config import PipelineConfig


@pytest.fixture(scope="session")
def base():
    return make_base()


@pytest.fixture(scope="session")
def base4():
    return make_base(4, 1.0)


@pytest.fixture(scope="session")
def config():
    return PipelineConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def poly(text, arity=2):
    return parse_poly(text, arity)


# acceptance bookkeeping: tests marked ``criterion(n)`` roll up into one line per criterion
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    ok = rep.passed if rep.when == "call" else False
    entry = _CRITERIA.setdefault(mark.args[0], {})
    entry[item.name] = entry.get(item.name, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        tests = _CRITERIA[n]
        failed = [name for name, ok in tests.items() if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {status} [{len(tests)} test(s)]{detail}")
