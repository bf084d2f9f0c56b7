import contextlib
import json
import time
from fractions import Fraction
from pathlib import Path

import pytest

from hypergeo.catalog import classify_catalog
from hypergeo.ratlinalg import RatMat, RatVec

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE = pytest.StashKey[dict]()


def load_fixture(name: str):
    return json.loads((FIXTURES / name).read_text())


def mat(rows) -> RatMat:
    return RatMat([[Fraction(x) for x in r] for r in rows])


def vec(xs) -> RatVec:
    return RatVec([Fraction(x) for x in xs])


@pytest.fixture(scope="session")
def worked():
    return load_fixture("worked_examples.json")


@pytest.fixture(scope="session")
def catalog_rows():
    """The full degree-4 catalog at default limits, computed once per session."""
    start = time.perf_counter()
    rows = classify_catalog()
    catalog_rows.elapsed = time.perf_counter() - start
    return rows


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""
    log = request.config.stash[_ACCEPTANCE]

    @contextlib.contextmanager
    def record(number: int, title: str):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            log[number] = (title, "FAIL", f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
            raise
        else:
            log[number] = (title, "PASS", f"{time.perf_counter() - start:.1f}s")

    return record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        title, status, detail = log[number]
        terminalreporter.write_line(f"criterion {number} [{status}] {title} ({detail})")
