"""Shared strategies and the acceptance summary printer."""

import pytest
from hypothesis import strategies as st

from traceconvex.ncpoly import EXACT, H, X, NcPoly

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        ok = rep.passed
        prev = _ACCEPTANCE.get(number, (True, title))
        _ACCEPTANCE[number] = (prev[0] and ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")


small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@st.composite
def nc_polys(draw, letters=(X, H), max_len=4, max_terms=5):
    """Random exact polynomial in the given letters."""
    n = draw(st.integers(0, max_terms))
    table = {}
    for _ in range(n):
        w = tuple(draw(st.lists(st.sampled_from(letters), max_size=max_len)))
        table[w] = table.get(w, 0) + draw(st.fractions(min_value=-5, max_value=5, max_denominator=4))
    return NcPoly(table, EXACT)
