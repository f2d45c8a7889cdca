import itertools
import sys

import pytest

from subshift.core import Pattern, add, sub
from subshift.specfile import bundled_spec


def brute_count(spec, points):
    """Count assignments of ``points`` containing no forbidden translate, by full enumeration."""
    points = list(points)
    domain = set(points)
    q = len(spec.alphabet)
    placed = []
    for f in spec.forbidden:
        cells = list(f.items())
        h0 = cells[0][0]
        for c in points:
            g = sub(c, h0)
            shifted = [(add(g, h), s) for h, s in cells]
            if all(p in domain for p, _ in shifted):
                placed.append(shifted)
    total = 0
    for values in itertools.product(range(q), repeat=len(points)):
        x = dict(zip(points, values))
        if not any(all(x[p] == s for p, s in occ) for occ in placed):
            total += 1
    return total


def fibonacci(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


@pytest.fixture(scope="session")
def golden():
    return bundled_spec("golden_mean")


@pytest.fixture(scope="session")
def even():
    return bundled_spec("even_shift")


@pytest.fixture(scope="session")
def hard():
    return bundled_spec("hard_squares")


@pytest.fixture(scope="session")
def full2():
    return bundled_spec("full2")


def word(alphabet, bits):
    return Pattern.word(alphabet, list(bits))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
