import json
import os

import pytest

from qbouncer.basis import build_basis
from qbouncer.cli import run_scan
from qbouncer.config import parse_config
from qbouncer.dynamics import PositionGrid

DATA = os.path.join(os.path.dirname(__file__), "data")

# Acceptance outcomes, filled in by test_acceptance and echoed at the end.
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def oracles():
    with open(os.path.join(DATA, "oracles.json")) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def basis():
    return build_basis(100.0, 1.0, 500)


@pytest.fixture(scope="session")
def grid():
    return PositionGrid()


@pytest.fixture(scope="session")
def scan_config():
    """Default scenario with the Shannon index added to the entropic ones."""
    return parse_config({"alphas": ["2/3", "4/5", 1]})


@pytest.fixture(scope="session")
def default_run(scan_config, tmp_path_factory):
    """One full default scan written through the command-line layer."""
    out = tmp_path_factory.mktemp("scan_a")
    result = run_scan(scan_config, str(out))
    result["dir"] = str(out)
    return result


@pytest.fixture(scope="session")
def timeline(default_run):
    return default_run["timeline"]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
