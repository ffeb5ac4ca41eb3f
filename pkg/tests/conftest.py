import itertools
import math

import pytest

from lambertpi.model import FotdPlant

E = math.e


def bisect_root(f, a, b, iters=200):
    """Plain bisection, kept separate from any code under test."""
    fa = f(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


GRID_PLANTS = [FotdPlant(K, T, L) for K, T, L in itertools.product((0.5, 1.0, 2.0), repeat=3)]


@pytest.fixture
def unit_plant():
    return FotdPlant(1.0, 1.0, 1.0)


# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}")
