from __future__ import annotations

from pathlib import Path

import pytest

from dsa_audit.ingest import load_metric_table, load_sra_matrix, parse_report_document

ROOT = Path(__file__).resolve().parent.parent
PUBLISHED = ROOT / "fixtures" / "published"


@pytest.fixture(scope="session")
def published_dir() -> Path:
    return PUBLISHED


@pytest.fixture(scope="session")
def published_reports():
    return [parse_report_document(PUBLISHED / f"r{i}.json") for i in range(1, 5)]


@pytest.fixture(scope="session")
def sor_table():
    return load_metric_table(PUBLISHED / "sor-agg.json")


@pytest.fixture(scope="session")
def sra_matrix():
    return load_sra_matrix(PUBLISHED / "risk-matrix.json")


# -- acceptance summary ------------------------------------------------------------------

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash[ACCEPTANCE_LINES]

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        lines.append((number, f"[{status}] criterion {number}: {title}: {detail}"))
        assert passed, detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
