import math
from itertools import combinations

import numpy as np
import pytest

from gnp_extremes.bounds import cov_exact, moment_bounds, poisson_pmf, utvd_exact_at
from gnp_extremes.errors import DomainError, PreconditionError
from gnp_extremes.oracle import (
    enumerate_degree_multisets,
    enumerate_order_stat_pmf,
    enumerate_wn_pmf,
    exact_cov,
    exact_moment,
    exact_tvd_to_poisson,
)


def test_hand_count_n3():
    pmf = enumerate_wn_pmf(3, 0.5, 1.5)
    assert np.allclose(pmf.probabilities, [0.5, 0.375, 0.0, 0.125], atol=1e-15)
    assert exact_cov(3, 0.5, 1.5) == pytest.approx(1 / 16, abs=1e-15)
    assert exact_moment(3, 0.5, 1.5, 1) == pytest.approx(0.75, abs=1e-15)
    lam = 0.75
    expected = 0.5 * (sum(abs(a - poisson_pmf(lam, k))
                          for k, a in enumerate([0.5, 0.375, 0.0, 0.125]))
                      + 1 - sum(poisson_pmf(lam, k) for k in range(4)))
    assert exact_tvd_to_poisson(3, 0.5, 1.5) == pytest.approx(expected, rel=1e-12)
    assert exact_tvd_to_poisson(3, 0.5, 1.5) == pytest.approx(0.140, abs=5e-4)


def test_trivial_thresholds():
    for n in (3, 5):
        low = enumerate_wn_pmf(n, 0.4, -0.5).probabilities
        high = enumerate_wn_pmf(n, 0.4, n).probabilities
        assert low[n] == pytest.approx(1.0, abs=1e-15)
        assert high[0] == pytest.approx(1.0, abs=1e-15)
        assert exact_cov(n, 0.4, -0.5) == pytest.approx(0.0, abs=1e-15)
        assert exact_tvd_to_poisson(n, 0.4, n) == 0.0


def test_grid_invariants(oracle_grid):
    for n, p, y in oracle_grid:
        pmf = enumerate_wn_pmf(n, p, y)
        assert abs(pmf.probabilities.sum() - 1) <= 1e-12
        assert exact_cov(n, p, y) >= -1e-15
        assert abs(exact_cov(n, p, y) - cov_exact(n, p, y)) <= 1e-12
        assert pmf.mean() == pytest.approx(exact_moment(n, p, y, 1), abs=1e-15)


def test_exchangeability():
    # the law of I_1 equals that of I_2 (any pair of vertices)
    from gnp_extremes.oracle import _graphs, _prob, _weights
    degrees, edges = _graphs(5)
    weights = _weights(5, 0.3)
    for y in (0.5, 1.5, 2.5):
        marginals = [_prob(degrees[:, v] > y, edges, weights) for v in range(5)]
        assert np.ptp(marginals) < 1e-15


def test_order_statistics():
    pmf = enumerate_order_stat_pmf(4, 0.5, 1)
    assert pmf.probabilities.sum() == pytest.approx(1.0, abs=1e-14)
    # max degree is 0 only for the empty graph
    assert pmf.probabilities[0] == pytest.approx(0.5 ** 6, rel=1e-14)
    # duality: P(d_{m:n} <= y) = P(W_n <= m - 1)
    for m in (1, 2, 3):
        order = enumerate_order_stat_pmf(5, 0.3, m).probabilities
        for y in (0.5, 1.5, 2.5, 3.5):
            wn = enumerate_wn_pmf(5, 0.3, y).probabilities
            assert order[: math.floor(y) + 1].sum() == pytest.approx(wn[:m].sum(), abs=1e-14)


def test_degree_multisets():
    law = enumerate_degree_multisets(4, 0.5)
    assert sum(law.values()) == pytest.approx(1.0, abs=1e-14)
    assert law[(3, 3, 3, 3)] == pytest.approx(0.5 ** 6)
    assert all(sum(key) % 2 == 0 for key in law)


def test_brute_force_cross_check():
    # independent reference: loop over graphs directly with floats
    n, p, y = 4, 0.3, 1.5
    pairs = list(combinations(range(n), 2))
    probs = np.zeros(n + 1)
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        e = 0
        for b, (i, j) in enumerate(pairs):
            if mask >> b & 1:
                deg[i] += 1
                deg[j] += 1
                e += 1
        probs[sum(d > y for d in deg)] += p ** e * (1 - p) ** (len(pairs) - e)
    assert np.allclose(enumerate_wn_pmf(n, p, y).probabilities, probs, atol=1e-14)


def test_tvd_dominated(oracle_grid):
    for n, p, y in oracle_grid:
        bound, degenerate = utvd_exact_at(n, p, y)
        tvd = exact_tvd_to_poisson(n, p, y)
        # a degenerate bound is 0 while W = 0 a.s.; the oracle is good to 1e-15
        assert tvd <= bound or (degenerate and tvd <= 1e-15)


def test_moment_bounds_bracket():
    for n in (3, 4, 5):
        for p in (0.3, 0.5, 0.7):
            for k in range(n + 1):
                y = k - 0.5
                for r in (1, 2):
                    value = exact_moment(n, p, y, r)
                    lower, upper = moment_bounds(n, p, r, y + 0.5)
                    assert lower <= value + 1e-14 and value <= upper + 1e-14


def test_refusals():
    with pytest.raises(PreconditionError):
        enumerate_wn_pmf(7, 0.5, 2.5)
    with pytest.raises(DomainError):
        enumerate_wn_pmf(2, 0.5, 0.5)
    with pytest.raises(DomainError):
        exact_moment(3, 0.5, 1.5, 0)
    with pytest.raises(DomainError):
        enumerate_order_stat_pmf(3, 0.5, 4)
