import pytest

from lgorb.cli import parse_instance
from lgorb.symmetry import build_symmetry_data

LOOP7 = "x1^3*x2 + x2^5*x3 + x3^3*x4 + x4^5*x1"
DELTA = ["1/8", "5/8", "7/8", "3/8"]


def instance(poly, G=None, S=()):
    """(f, G, S) from a polynomial string, a group spec and cycle strings."""
    if G is None:
        G = {"kind": "trivial"}
    elif isinstance(G, list):
        G = {"kind": "generated", "generators": G}
    elif isinstance(G, str):
        G = {"kind": G}
    return parse_instance({"polynomial": poly, "G": G, "S": {"generators": list(S)}})


@pytest.fixture(scope="session")
def loop7():
    return instance(LOOP7, [DELTA], ["(1 3)(2 4)"])


@pytest.fixture(scope="session")
def loop7_data(loop7):
    return build_symmetry_data(*loop7)


@pytest.fixture(scope="session")
def loop7_pair(loop7):
    from lgorb.mirror import bhht_dual

    return bhht_dual(*loop7)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
