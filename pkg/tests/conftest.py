from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from inducilab.graph import Graph

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@st.composite
def graphs(draw, min_n: int = 0, max_n: int = 7) -> Graph:
    """Random simple graphs as an edge subset of the complete graph."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, c in zip(pairs, chosen) if c])


@st.composite
def group_factors(draw, max_order: int = 24) -> tuple[int, ...]:
    factors = draw(st.lists(st.integers(1, 6), min_size=1, max_size=3))
    order = 1
    out = []
    for f in factors:
        if order * f <= max_order:
            out.append(f)
            order *= f
    return tuple(out) or (1,)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # tests never write to the user's cache; the 8- and 9-vertex class lists
    # are only read from an existing cache when one is configured explicitly
    if "INDUCILAB_CACHE" not in os.environ:
        monkeypatch.setenv("INDUCILAB_CACHE", str(tmp_path_factory.getbasetemp() / "cache"))


# ---------------------------------------------------------------------------
# acceptance report: one pass/fail line per criterion at the end of the run

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _ACCEPTANCE[number] = (status, title, f"{detail} ({rep.duration:.1f}s)")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}: {detail}")
