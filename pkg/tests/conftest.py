"""Shared oracles and fixtures.

The oracles here are deliberately naive and independent of the package:
plain list iteration for terms, schoolbook products for matrices.
"""
from fractions import Fraction
from itertools import product

import pytest

from horadam3 import make_spec


def oracle_terms(r, s, t, init, lo, hi):
    """Dict n -> exact term for lo <= n <= hi, by forward and backward list iteration."""
    terms = {0: Fraction(init[0]), 1: Fraction(init[1]), 2: Fraction(init[2])}
    for n in range(3, hi + 1):
        terms[n] = r * terms[n - 1] + s * terms[n - 2] + t * terms[n - 3]
    for n in range(-1, lo - 1, -1):
        terms[n] = (terms[n + 3] - r * terms[n + 2] - s * terms[n + 1]) / Fraction(t)
    return terms


def oracle_matmul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def oracle_matpow(m, n):
    out = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    for _ in range(n):
        out = oracle_matmul(out, m)
    return out


def acceptance_grid():
    """All integer (r, s, t) with |r|, |s|, |t| <= 3, t != 0, times three initial triples."""
    specs = []
    for r, s, t in product(range(-3, 4), repeat=3):
        if t == 0:
            continue
        for a, b, c in ((0, 1, r), (1, 1, 2), (2, -1, 3)):
            specs.append(make_spec(r, s, t, a, b, c))
    return specs


SMALL_GRID = [
    make_spec(1, 1, 1, 0, 1, 1),
    make_spec(0, 1, 1, 0, 1, 0),
    make_spec(1, 1, 1, 1, 1, 2),
    make_spec(2, -1, 3, 2, -1, 3),
    make_spec(-3, 2, -1, 1, 1, 2),
    make_spec(1, 0, 2, Fraction(1, 2), -3, Fraction(5, 7)),
    make_spec(3, -3, 1, 0, 1, 3),  # triple root x = 1: discriminant zero
]


@pytest.fixture(scope="session")
def grid():
    return acceptance_grid()


# -- acceptance summary -------------------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
