import numpy as np
import pytest

from scalegauge import Lattice


@pytest.fixture
def line():
    return Lattice((256,), 0.1)


@pytest.fixture
def square():
    return Lattice((16, 16), 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("SCALEGAUGE_SEED", raising=False)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
