import json
import sys
from pathlib import Path

import numpy as np
import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

FIXTURE = HERE / "data" / "stars_fixture.csv"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixture_csv():
    return FIXTURE


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory):
    """A 1,500-row synthetic catalogue, big enough for the multi-class paths."""
    from qkstars.data import write_csv
    from qkstars.synthetic import synthetic_catalogue

    path = tmp_path_factory.mktemp("cat") / "stars.csv"
    write_csv(synthetic_catalogue(1500, seed=3), path)
    return path


@pytest.fixture
def write_config(tmp_path):
    def _write(**overrides):
        cfg = {"out": str(tmp_path / "out")}
        cfg.update(overrides)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return path
    return _write


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
