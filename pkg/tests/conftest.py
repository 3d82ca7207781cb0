"""Shared fixtures and the per-criterion acceptance summary.

Tests marked ``@pytest.mark.criterion(N)`` are grouped by N; after the run
one PASS/FAIL line per criterion is printed together with any notes the
tests attached through ``record_property("note", ...)``.
"""
from collections import defaultdict
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

DATA = Path(__file__).parent / "data"

CRITERIA = {
    1: "tied depth-2 n=11: real on (-1, 1), complex at +-1.05, boundary 1.0",
    2: "shifted link mu=lambda+0.25: boundaries 0.75 and -1.0, nine real levels at 0.95",
    3: "exact closed-form element verification and one-parameter micro-identities",
    4: "exact reduction identities between the three models",
    5: "Dieudonne kernel dimension, residuals and rank-one span agreement",
    6: "metric pipeline: positivity, quasi-hermiticity, Dyson factor, identity limit",
    7: "sign-flip spectral invariance",
    8: "sign-flip inversion of the banded P^(6)",
    9: "hermitian limit spectra and unit band entries",
    10: "CLI byte stability and exit codes",
}

_results = defaultdict(list)


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", int(m.args[0])))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    crit = props.get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        notes = [v for k, v in report.user_properties if k == "note"]
        _results[crit].append((report.nodeid.split("::")[-1], report.passed, notes))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(CRITERIA):
        rows = _results.get(crit)
        if not rows:
            continue
        ok = all(passed for _, passed, _ in rows)
        n_ok = sum(passed for _, passed, _ in rows)
        tr.write_line(f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'}  ({n_ok}/{len(rows)} checks)  {CRITERIA[crit]}")
        for name, passed, notes in rows:
            if not passed:
                tr.write_line(f"    failed: {name}")
            for note in notes:
                tr.write_line(f"    note: {note}")


@pytest.fixture
def data_dir():
    return DATA
