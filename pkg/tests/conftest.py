import sys
import time
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from subset_glauber.graph import Graph  # noqa: E402

SUITE_BUDGET_S = 20 * 60
ACCEPTANCE_LINES: list[str] = []
_session = {}


@st.composite
def graphs(draw, min_n=1, max_n=6, max_m=None):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    picked = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_m) if pairs else st.just([]))
    # random endpoint orientation and edge order
    flips = draw(st.lists(st.booleans(), min_size=len(picked), max_size=len(picked)))
    edges = tuple((v, u) if f else (u, v) for (u, v), f in zip(picked, flips))
    return Graph(n, edges)


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _session.get("start", time.perf_counter())
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    verdict = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(
        f"[{verdict}] 10 whole suite: {elapsed:.1f} s (budget {SUITE_BUDGET_S} s)"
    )


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _session.get("start", time.perf_counter())
    if ACCEPTANCE_LINES and elapsed >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def record_criterion():
    def record(number, name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {number} {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record
