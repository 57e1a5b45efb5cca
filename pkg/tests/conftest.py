import json
from pathlib import Path

import numpy as np
import pytest

from topowalk.lattice import LatticeSpec

GOLDEN = Path(__file__).parent / "golden"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_lattice():
    return LatticeSpec(-8, 7)


@pytest.fixture(scope="session")
def thresholds():
    return json.loads((GOLDEN / "thresholds.json").read_text())


@pytest.fixture(autouse=True)
def _isolated_output(tmp_path, monkeypatch):
    monkeypatch.delenv("TOPOWALK_OUT", raising=False)
    monkeypatch.chdir(tmp_path)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
