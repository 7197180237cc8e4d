from __future__ import annotations

import json
import time
from pathlib import Path

import pytest

from renormlab import Side, build_fs, fixed_point
from renormlab.extension import build_extension, join_bimodal

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, tuple[str, str]] = {}
_t0 = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _criteria.get(n, (title, "PASS"))[1]
        status = "PASS" if rep.outcome == "passed" and prev == "PASS" else "FAIL"
        _criteria[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status = _criteria[n]
        tr.write_line(f"criterion {n:2d}: {status}  {title}")
    tr.write_line(f"session wall time: {time.perf_counter() - _t0:.1f} s")


@pytest.fixture(scope="session")
def derived() -> dict:
    return json.loads((FIXTURES / "derived.json").read_text())


@pytest.fixture(scope="session", params=[Side.LEFT, Side.RIGHT], ids=["l", "r"])
def side(request) -> Side:
    return request.param


@pytest.fixture(scope="session")
def fs_pair() -> dict:
    return {s: build_fs(s, fixed_point(s).c_star, depth=8) for s in Side}


@pytest.fixture(scope="session")
def gs_pair(fs_pair) -> dict:
    return {s: build_extension(fs_pair[s], 12) for s in Side}


@pytest.fixture(scope="session")
def joined(gs_pair):
    return join_bimodal(gs_pair[Side.LEFT], gs_pair[Side.RIGHT])
