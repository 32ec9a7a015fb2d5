"""Arbitrary-precision reference values shared by the test modules."""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp
import pytest

mp.mp.dps = 60


def mp_binom_pmf(n: int, p: float, k: int) -> mp.mpf:
    """Exact-rational binomial pmf at the double ``p``, rounded to 60 digits."""
    pf = Fraction(p)
    value = math.comb(n, k) * pf ** k * (1 - pf) ** (n - k)
    return mp.mpf(value.numerator) / value.denominator


def mp_binom_tail(n: int, p: float, y: float) -> mp.mpf:
    """``P(Bin(n, p) > y)`` by high-precision summation of the pmf.

    Terms are generated by the ratio recurrence starting at the first
    index above ``y``, which keeps huge ``n`` affordable.
    """
    k0 = max(0, math.floor(y) + 1)
    if k0 > n:
        return mp.mpf(0)
    with mp.workdps(max(60, int(math.log10(n + 1)) + 40)):
        pm = mp.mpf(p)
        qm = 1 - pm
        log_term = (mp.loggamma(n + 1) - mp.loggamma(k0 + 1) - mp.loggamma(n - k0 + 1)
                    + k0 * mp.log(pm) + (n - k0) * mp.log(qm))
        term = mp.exp(log_term)
        total = mp.mpf(0)
        ratio = pm / qm
        k = k0
        while k <= n:
            total += term
            if term < total * mp.mpf(10) ** (-40) and k > n * p:
                break
            term *= ratio * (n - k) / (k + 1)
            k += 1
        return +total


def mp_normal_tail(x: float) -> mp.mpf:
    return mp.erfc(mp.mpf(x) / mp.sqrt(2)) / 2


@pytest.fixture(scope="session")
def oracle_grid():
    """(n, p, y) grid of the small-graph identity checks."""
    return [(n, p, k - 0.5) for n in (3, 4, 5, 6) for p in (0.3, 0.5, 0.7)
            for k in range(n + 1)]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
