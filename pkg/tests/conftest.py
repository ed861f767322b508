import random
from pathlib import Path

import pytest

from uncal.surface import parse_term

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

_acceptance_lines = []


def record_acceptance(number, ok, detail):
    _acceptance_lines.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return random.Random(12345)


def P(text, src=None):
    return parse_term(text, src=src)
