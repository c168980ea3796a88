from decimal import Decimal
from pathlib import Path

import pytest
from hypothesis import settings

from dqaudit import _kernels
from dqaudit.model import Column, Table, cell

FIXTURES = Path(__file__).parent / "fixtures"

# first calls may include JIT compilation; per-example timing is not what these tests measure
settings.register_profile("dqaudit", deadline=None)
settings.load_profile("dqaudit")


def col(values, name="v"):
    return Column(name, [cell(v) for v in values])


def table(name="t", **columns):
    return Table(name, [col(v, n) for n, v in columns.items()])


def D(text):
    return Decimal(str(text))


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    if request.param == "numba":
        if _kernels.JIT is None:
            pytest.skip("numba not installed")
        monkeypatch.setattr(_kernels, "_ACTIVE", _kernels.JIT)
    else:
        monkeypatch.setattr(_kernels, "_ACTIVE", _kernels.NUMPY)
    return request.param


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
