import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from untainted.graph import TannerGraph, cycle_code, hamming74, random_regular_graph  # noqa: E402

SINGLE_CHECK_ALIST = """2 1
1 2
1 1
2
1
1
1 2
"""


@pytest.fixture
def single_check():
    return TannerGraph.from_edges(2, 1, [(0, 0), (1, 0)])


@pytest.fixture
def hamming():
    return hamming74()


@pytest.fixture
def cycle4():
    return cycle_code(4)


@pytest.fixture
def step_gadget():
    """v0 step 1 via c0=(v0,u2); v1 only via c1=(v0,v1) -> step 2;
    v3 only via c2=(v1,v3) -> step 3. Punctured {0,1,3}."""
    g = TannerGraph.from_edges(4, 3, [(0, 0), (2, 0), (0, 1), (1, 1), (1, 2), (3, 2)])
    return g, (0, 1, 3)


@pytest.fixture(scope="session")
def regular96():
    return random_regular_graph(96, 3, 6, seed=11)


@pytest.fixture(scope="session")
def regular504():
    return random_regular_graph(504, 3, 6, seed=5)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def report(request, capsys):
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(num, name, ok, detail=""):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else "")
        request.config._acceptance_lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return _report
