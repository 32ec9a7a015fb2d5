"""Exact laws by exhaustive enumeration of labeled graphs on n <= 6 vertices.

Every statistic is first tallied as an exact integer count per edge number
``e`` (all graphs with ``e`` edges share the weight ``p^e q^(M-e)``), and only
then weighted and summed with ``math.fsum``.  The 2^15 graphs on six
vertices never meet floating point individually.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .bounds import poisson_pmf, poisson_sf
from .errors import DomainError, PreconditionError

MAX_VERTICES = 6

__all__ = [
    "MAX_VERTICES",
    "OraclePmf",
    "enumerate_degree_multisets",
    "enumerate_order_stat_pmf",
    "enumerate_wn_pmf",
    "exact_cov",
    "exact_moment",
    "exact_tvd_to_poisson",
]


@dataclass(frozen=True)
class OraclePmf:
    """Exact law of an integer statistic on ``0..len(probabilities)-1``."""

    probabilities: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.probabilities.size)

    def mean(self) -> float:
        return math.fsum(self.support * self.probabilities)

    def binomial_moment(self, r: int) -> float:
        """``E C(W, r)``."""
        return math.fsum(math.comb(k, r) * pk for k, pk in enumerate(self.probabilities))


def _check_n(n: int) -> None:
    if int(n) != n or n < 3:
        raise DomainError(f"oracle needs an integer n >= 3, got {n!r}")
    if n > MAX_VERTICES:
        raise PreconditionError(
            f"exhaustive enumeration is capped at n = {MAX_VERTICES} "
            f"(n = {n} would mean 2^{n * (n - 1) // 2} graphs)")


@lru_cache(maxsize=None)
def _graphs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Degree table (graphs x n) and edge counts for all labeled graphs."""
    pairs = list(combinations(range(n), 2))
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    degrees = np.zeros((masks.size, n), dtype=np.int64)
    for e, (i, j) in enumerate(pairs):
        bit = (masks >> e) & 1
        degrees[:, i] += bit
        degrees[:, j] += bit
    edges = degrees.sum(axis=1) // 2
    degrees.setflags(write=False)
    edges.setflags(write=False)
    return degrees, edges


def _weights(n: int, p: float) -> list[float]:
    pairs = n * (n - 1) // 2
    q = 1.0 - p
    return [p ** e * q ** (pairs - e) for e in range(pairs + 1)]


def _prob(event: np.ndarray, edges: np.ndarray, weights: list[float]) -> float:
    # Exact tally of graphs per edge count, then one weighted fsum.
    tally = np.bincount(edges[event], minlength=len(weights))
    return math.fsum(int(c) * w for c, w in zip(tally, weights))


def enumerate_wn_pmf(n: int, p: float, y: float) -> OraclePmf:
    """Exact law of ``W_n``, the number of vertices with degree ``> y``."""
    _check_n(n)
    degrees, edges = _graphs(n)
    w = np.count_nonzero(degrees > y, axis=1)
    weights = _weights(n, p)
    probs = np.array([_prob(w == k, edges, weights) for k in range(n + 1)])
    return OraclePmf(probs)


def enumerate_order_stat_pmf(n: int, p: float, m: int) -> OraclePmf:
    """Exact law of ``d_{m:n}``, the ``m``-th largest degree."""
    _check_n(n)
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m!r}")
    degrees, edges = _graphs(n)
    order = -np.sort(-degrees, axis=1)[:, m - 1]
    weights = _weights(n, p)
    return OraclePmf(np.array([_prob(order == d, edges, weights) for d in range(n)]))


def enumerate_degree_multisets(n: int, p: float) -> dict[tuple[int, ...], float]:
    """Exact law of the sorted (decreasing) degree sequence."""
    _check_n(n)
    degrees, edges = _graphs(n)
    ordered = -np.sort(-degrees, axis=1)
    weights = _weights(n, p)
    keys, inverse = np.unique(ordered, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    return {tuple(int(v) for v in key): _prob(inverse == i, edges, weights)
            for i, key in enumerate(keys)}


def exact_cov(n: int, p: float, y: float) -> float:
    """``Cov(I_1, I_2)`` for the exceedance indicators of vertices 1 and 2."""
    _check_n(n)
    degrees, edges = _graphs(n)
    weights = _weights(n, p)
    i1 = degrees[:, 0] > y
    i2 = degrees[:, 1] > y
    return _prob(i1 & i2, edges, weights) - _prob(i1, edges, weights) * _prob(i2, edges, weights)


def exact_moment(n: int, p: float, y: float, r: int) -> float:
    """``E C(W_n, r)`` at raw threshold ``y``."""
    if int(r) != r or not 1 <= r <= n:
        raise DomainError(f"r must be an integer in [1, n], got {r!r}")
    return enumerate_wn_pmf(n, p, y).binomial_moment(int(r))


def exact_tvd_to_poisson(n: int, p: float, y: float) -> float:
    """Total variation distance between ``W_n`` and ``Poisson(E W_n)``.

    Includes the Poisson mass beyond ``n``, where ``W_n`` has none.
    """
    pmf = enumerate_wn_pmf(n, p, y)
    lam = pmf.mean()
    diffs = [abs(pk - poisson_pmf(lam, k)) for k, pk in enumerate(pmf.probabilities)]
    return 0.5 * (math.fsum(diffs) + poisson_sf(lam, n))
