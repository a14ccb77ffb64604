import itertools
import math

import pytest

from thermoflow.subshift import SftSpec, full_shift, golden_mean

GOLDEN = (1 + math.sqrt(5)) / 2


def two_block_union() -> SftSpec:
    """Full 2-shifts on {0,1} and on {2,3}, no passage between them."""
    mixed = [(a, b) for a in range(4) for b in range(4) if (a < 2) != (b < 2)]
    return SftSpec(4, mixed, "two full 2-shifts")


def brute_words(alphabet_size, n):
    return itertools.product(range(alphabet_size), repeat=n)


@pytest.fixture
def gm():
    return golden_mean()


@pytest.fixture
def f2():
    return full_shift(2)


@pytest.fixture
def union4():
    return two_block_union()


# (criterion, passed, detail) lines filled in by test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
