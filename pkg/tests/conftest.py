"""Shared fixtures: full experiment runs are computed once per session."""

import functools

import pytest

from crossdiff.experiments import STANDARD_NODES, ExperimentConfig, run_single

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def experiment_run(experiment: str, scheme: str, n_nodes: int):
    cfg = ExperimentConfig(experiment=experiment, mesh_nodes=[n_nodes]).resolved()
    return run_single(cfg, scheme, n_nodes)


@pytest.fixture(scope="session")
def runs():
    return experiment_run


@pytest.fixture(scope="session")
def standard_nodes():
    return STANDARD_NODES


@pytest.fixture
def report():
    """Record a one-line verdict for the acceptance summary."""

    def _report(label: str, ok: bool, detail: str = ""):
        ACCEPTANCE_LINES.append((label, bool(ok), detail))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
