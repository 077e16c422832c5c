"""Shared fixtures and the acceptance-suite pass/fail reporter."""

from __future__ import annotations

import re

import pytest

from edge_placer.model import build_topology
from edge_placer.scenario import paper_scenario
from edge_placer.simulator import compute_metrics, run_simulation


@pytest.fixture(scope="session")
def paper():
    return paper_scenario()


@pytest.fixture(scope="session")
def paper_topology(paper):
    return build_topology(paper.topology_spec())


class RunCache:
    """Memoizes full paper-scenario runs; several test modules share them."""

    def __init__(self, scenario):
        self.scenario = scenario
        self._traces = {}

    def trace(self, pattern, seed, n=1000):
        key = (pattern, seed, n)
        if key not in self._traces:
            self._traces[key] = run_simulation(self.scenario, pattern, n, seed)
        return self._traces[key]

    def metrics(self, pattern, seed, n=1000):
        return compute_metrics(self.trace(pattern, seed, n))


@pytest.fixture(scope="session")
def paper_runs(paper):
    return RunCache(paper)


# --- acceptance criterion reporting ----------------------------------------
#
# Tests named test_criterion_<n>_<slug> (in test_acceptance.py) get one
# PASS/FAIL line each in the terminal summary.

_CRITERION_RE = re.compile(r"test_criterion_(\d+)_([a-z0-9_]+)")
_criterion_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION_RE.search(report.nodeid)
    if not match:
        return
    number, slug = int(match.group(1)), match.group(2)
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        _criterion_results[number] = (status, slug)
    elif report.when == "setup" and (report.failed or report.skipped):
        _criterion_results[number] = ("FAIL" if report.failed else "SKIP", slug)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_criterion_results):
        status, slug = _criterion_results[number]
        terminalreporter.write_line(f"criterion {number} [{slug.replace('_', ' ')}]: {status}")
