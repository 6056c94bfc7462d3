import pytest
from gmpy2 import mpq

from pcontract.fixtures import FIXTURES
from pcontract.fuzz import fuzz_generate


def q(a, b=1):
    return mpq(a, b)


@pytest.fixture
def map_g():
    return FIXTURES["map-g"]()


@pytest.fixture
def map_half():
    return FIXTURES["map-half"]()


@pytest.fixture
def map_deg():
    return FIXTURES["map-deg"]()


@pytest.fixture
def map_inc():
    return FIXTURES["map-inc"]()


@pytest.fixture(params=sorted(FIXTURES))
def any_fixture(request):
    return FIXTURES[request.param]()


# a small mixed corpus for property checks that are too slow for hundreds of maps
FUZZ_SAMPLE = [(n, s, plant) for n in (2, 3, 4, 5) for s in range(6) for plant in (False, True)]


@pytest.fixture(params=FUZZ_SAMPLE, ids=[f"n{n}-s{s}{'-plant' if p else ''}" for n, s, p in FUZZ_SAMPLE])
def fuzz_map(request):
    n, s, plant = request.param
    return fuzz_generate(n, s, plant=plant)


CORPUS = [("fixture", name) for name in sorted(FIXTURES)] + [("fuzz", t) for t in FUZZ_SAMPLE]


def _corpus_id(item):
    kind, val = item
    if kind == "fixture":
        return val
    n, s, p = val
    return f"fuzz-n{n}-s{s}{'-plant' if p else ''}"


@pytest.fixture(params=CORPUS, ids=[_corpus_id(c) for c in CORPUS])
def corpus_map(request):
    kind, val = request.param
    if kind == "fixture":
        return FIXTURES[val]()
    n, s, plant = val
    return fuzz_generate(n, s, plant=plant)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
