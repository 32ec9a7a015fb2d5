"""Closed-form quantities for the extreme degrees of G(n, p).

Everything here is deterministic: normalizing constants, the degree
threshold for a level ``t``, the exceedance probability of one vertex, the
exact covariance of two exceedance indicators, the Stein-Chen total
variation bound and its asymptotic form, the extreme-value limit law, and
the moment bounds on the number of high-degree vertices.

Degrees are centred at ``(n - 1) p`` and scaled by ``sqrt((n - 1) p q)``,
their exact mean and standard deviation.  Exceedance is always strict:
vertex ``i`` exceeds level ``t`` when ``d_i > y``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

from scipy.special import gammainc

from .binom import BinomialSpec, binom_pmf, binom_tail
from .errors import DomainError

__all__ = [
    "LOW_VARIANCE_NPQ",
    "BoundReport",
    "LowVarianceWarning",
    "ModelParams",
    "ThresholdSet",
    "bound_report",
    "cov_asymptotic",
    "cov_exact",
    "cramer_gap",
    "cramer_threshold",
    "degree_ge_threshold",
    "exceedance_prob",
    "limit_cdf",
    "moment_bounds",
    "normalization",
    "pi1",
    "poisson_cdf",
    "poisson_pmf",
    "poisson_sf",
    "thresholds",
    "utvd_asymptotic",
    "utvd_exact",
    "utvd_exact_at",
]

#: Below this value of ``n p q`` the asymptotic formulas are not claimed.
LOW_VARIANCE_NPQ = 25.0

#: ``pi1`` below this is treated as zero exceedance mass (bound degenerate).
DEGENERATE_PI1 = 1e-300


class LowVarianceWarning(UserWarning):
    """``n p q`` is below ``LOW_VARIANCE_NPQ``; asymptotics are not asserted."""


@dataclass(frozen=True)
class ModelParams:
    """One problem instance: ``n`` vertices, edge probability ``p``, level ``t``, rank ``m``."""

    n: int
    p: float
    t: float = 0.0
    m: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DomainError(f"n must be an integer >= 3, got {self.n!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        if int(self.m) != self.m or not 1 <= self.m <= self.n:
            raise DomainError(f"m must be an integer in [1, n], got {self.m!r}")
        if not math.isfinite(self.t):
            raise DomainError(f"t must be finite, got {self.t!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def with_schedule(cls, n: int, schedule: Callable[[int], float],
                      t: float = 0.0, m: int = 1) -> "ModelParams":
        """Instance whose edge probability is ``schedule(n)``."""
        return cls(n, float(schedule(n)), t, m)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def npq(self) -> float:
        return self.n * self.p * (1.0 - self.p)

    @property
    def low_variance(self) -> bool:
        return self.npq < LOW_VARIANCE_NPQ


@dataclass(frozen=True)
class ThresholdSet:
    a_n: float
    b_n: float
    x_n: float
    y: float


@dataclass(frozen=True)
class BoundReport:
    """All Stein-Chen quantities for one instance."""

    params: ModelParams
    thresholds: ThresholdSet
    pi1: float
    lam: float
    cov_exact: float
    cov_asym: float
    utvd_exact: float
    utvd_asym: float
    degenerate: bool
    low_variance: bool

    def as_row(self) -> dict:
        th = self.thresholds
        return {
            "n": self.params.n,
            "p": self.params.p,
            "t": self.params.t,
            "a_n": th.a_n,
            "b_n": th.b_n,
            "x_n": th.x_n,
            "y": th.y,
            "pi1": self.pi1,
            "lambda_n": self.lam,
            "cov_exact": self.cov_exact,
            "cov_asym": self.cov_asym,
            "cov_ratio": _ratio(self.cov_exact, self.cov_asym),
            "utvd_exact": self.utvd_exact,
            "utvd_asym": self.utvd_asym,
            "utvd_ratio": _ratio(self.utvd_exact, self.utvd_asym),
            "n_pi1_et": self.lam * math.exp(self.params.t),
            "degenerate": self.degenerate,
            "low_npq": self.low_variance,
        }


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else math.nan


def normalization(n: int) -> tuple[float, float]:
    """Extreme-value constants ``(a_n, b_n)`` for maxima of ``n`` standardized variables."""
    if n < 3:
        raise DomainError(f"normalization needs n >= 3, got {n!r}")
    two_log = 2.0 * math.log(n)
    root = math.sqrt(two_log)
    a_n = 1.0 / root
    b_n = root - 0.5 * (math.log(math.log(n)) + math.log(4.0 * math.pi)) / root
    return a_n, b_n


def thresholds(params: ModelParams, centering: str = "n-1") -> ThresholdSet:
    """Level ``x_n(t) = a_n t + b_n`` and the raw-degree threshold ``y``.

    ``centering="n-1"`` (default) uses the exact degree moments,
    ``y = (n-1)p + x_n sqrt((n-1)pq)``; ``centering="n"`` gives the
    ``np + x_n sqrt(npq)`` variant used by the classical statement.
    """
    a_n, b_n = normalization(params.n)
    x_n = a_n * params.t + b_n
    if centering == "n-1":
        trials = params.n - 1
    elif centering == "n":
        trials = params.n
    else:
        raise DomainError(f"unknown centering {centering!r}")
    y = trials * params.p + x_n * math.sqrt(trials * params.p * params.q)
    return ThresholdSet(a_n, b_n, x_n, y)


def degree_ge_threshold(k: float) -> float:
    """Strict threshold ``y`` with ``{d > y} = {d >= k}`` on integer degrees."""
    return math.ceil(k) - 0.5


def exceedance_prob(n: int, p: float, y: float) -> float:
    """``P(d_1 > y)`` where ``d_1 ~ Bin(n - 1, p)``."""
    return binom_tail(BinomialSpec(n - 1, p), y)


def pi1(params: ModelParams) -> float:
    """Probability that a given vertex exceeds the level ``t``."""
    return exceedance_prob(params.n, params.p, thresholds(params).y)


def cov_exact(n: int, p: float, y: float) -> float:
    """Exact ``Cov(I_1, I_2)`` of two exceedance indicators at raw threshold ``y``.

    Conditioning on the edge between vertices 1 and 2 gives
    ``pq [P(B > y - 1) - P(B > y)]^2`` with ``B ~ Bin(n - 2, p)``.  The
    bracket is the mass of the only integer in ``(y - 1, y]``, i.e.
    ``P(B = floor(y))``, which is evaluated directly to avoid subtracting
    two nearly equal tails.
    """
    if n < 3:
        raise DomainError(f"cov_exact needs n >= 3, got {n!r}")
    point = binom_pmf(BinomialSpec(n - 2, p), math.floor(y))
    return p * (1.0 - p) * point * point


def cov_asymptotic(params: ModelParams) -> float:
    """Large-``n`` form ``2 e^{-2t} log(n) / n^3`` of the indicator covariance."""
    n = params.n
    return 2.0 * math.exp(-2.0 * params.t) * math.log(n) / n ** 3


def utvd_exact_at(n: int, p: float, y: float) -> tuple[float, bool]:
    """Stein-Chen bound on ``d_TV(W_n, Poisson(lambda_n))`` at raw threshold ``y``.

    Returns ``(bound, degenerate)``; ``degenerate`` is set (and the bound is
    0) when the exceedance probability underflows so that ``lambda_n = 0``.
    """
    prob = exceedance_prob(n, p, y)
    if prob < DEGENERATE_PI1:
        return 0.0, True
    lam = n * prob
    cov = cov_exact(n, p, y)
    return -math.expm1(-lam) * (prob + n * (n - 1) * cov / lam), False


def utvd_exact(params: ModelParams) -> float:
    bound, _ = utvd_exact_at(params.n, params.p, thresholds(params).y)
    return bound


def utvd_asymptotic(params: ModelParams) -> float:
    """Asymptotic bound ``(1 + 2 log n)/n * e^{-t} (1 - exp(-e^{-t}))``."""
    n = params.n
    lam = math.exp(-params.t)
    return (1.0 + 2.0 * math.log(n)) / n * lam * -math.expm1(-lam)


def bound_report(params: ModelParams, warn: bool = True,
                 centering: str = "n-1") -> BoundReport:
    """Every Stein-Chen quantity for ``params`` at the chosen centering."""
    th = thresholds(params, centering)
    prob = exceedance_prob(params.n, params.p, th.y)
    bound, degenerate = utvd_exact_at(params.n, params.p, th.y)
    if warn and params.low_variance:
        warnings.warn(f"npq = {params.npq:.3g} < {LOW_VARIANCE_NPQ:g}: asymptotic "
                      "forms are not asserted here", LowVarianceWarning, stacklevel=2)
    return BoundReport(
        params=params,
        thresholds=th,
        pi1=prob,
        lam=params.n * prob,
        cov_exact=cov_exact(params.n, params.p, th.y),
        cov_asym=cov_asymptotic(params),
        utvd_exact=bound,
        utvd_asym=utvd_asymptotic(params),
        degenerate=degenerate,
        low_variance=params.low_variance,
    )


def poisson_pmf(lam: float, k: int) -> float:
    if lam < 0 or k < 0:
        raise DomainError("poisson_pmf needs lam >= 0 and k >= 0")
    if lam == 0:
        return 1.0 if k == 0 else 0.0
    if math.isinf(lam):
        return 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def poisson_cdf(lam: float, k: int) -> float:
    """``P(Poisson(lam) <= k)`` by compensated summation of the pmf."""
    if k < 0:
        return 0.0
    return min(math.fsum(poisson_pmf(lam, j) for j in range(k + 1)), 1.0)


def poisson_sf(lam: float, k: int) -> float:
    """Tail remainder ``P(Poisson(lam) > k)``, computed directly (no ``1 - cdf``)."""
    if k < 0:
        return 1.0
    if lam == 0:
        return 0.0
    return float(gammainc(k + 1, lam))


def limit_cdf(m: int, t: float) -> float:
    """Limit law of the normalized ``m``-th largest degree at level ``t``.

    ``exp(-e^{-t}) * sum_{k<m} e^{-tk}/k!``, i.e. ``P(Poisson(e^{-t}) <= m - 1)``.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    lam = math.exp(-t) if t > -700 else math.inf
    return poisson_cdf(lam, int(m) - 1)


def _cramer_log_residual(x: float, log_ratio: float) -> float:
    # log(n phi(x) / x) - log(c)
    return log_ratio - 0.5 * math.log(2.0 * math.pi) - 0.5 * x * x - math.log(x)


def cramer_threshold(n: int, c: float) -> float:
    """Root ``x >= 1`` of ``n (2 pi)^{-1/2} e^{-x^2/2} / x = c``.

    Newton's method on the log form of the equation, started at
    ``sqrt(2 log(n/c))`` and safeguarded by bisection on ``[1, x0]``.
    """
    if n < 3:
        raise DomainError(f"cramer_threshold needs n >= 3, got {n!r}")
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    log_ratio = math.log(n) - math.log(c)
    g_lo = _cramer_log_residual(1.0, log_ratio)
    if g_lo < 0:
        raise DomainError(f"no root with x >= 1 for n={n}, c={c}")
    if g_lo == 0:
        return 1.0
    lo = 1.0
    hi = max(math.sqrt(2.0 * log_ratio), 1.0)
    while _cramer_log_residual(hi, log_ratio) > 0:
        hi *= 2.0
    x = hi
    for _ in range(200):
        g = _cramer_log_residual(x, log_ratio)
        if abs(g) <= 1e-14:
            return x
        if g > 0:
            lo = x
        else:
            hi = x
        step = g / (x + 1.0 / x)
        nxt = x + step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        x = nxt
    return x


def cramer_gap(n: int, t: float) -> float:
    """``|x(n, e^{-t}) - (a_n t + b_n)|``: Cramer root versus the affine level."""
    a_n, b_n = normalization(n)
    return abs(cramer_threshold(n, math.exp(-t)) - (a_n * t + b_n))


def moment_bounds(n: int, p: float, r: int, K: float) -> tuple[float, float]:
    """Bounds on ``E C(X, r)`` where ``X`` counts vertices of degree ``>= K``.

    ``C(n,r) P(Bin(n-r,p) >= K)^r <= E C(X,r) <= C(n,r) P(Bin(n-r,p) >= K-r-1)^r``.
    """
    if int(r) != r or not 1 <= r <= n - 1:
        raise DomainError(f"r must be an integer in [1, n-1], got {r!r}")
    spec = BinomialSpec(n - r, p)
    ways = math.comb(n, r)
    lower = ways * binom_tail(spec, degree_ge_threshold(K)) ** r
    upper = ways * binom_tail(spec, degree_ge_threshold(K - r - 1)) ** r
    return lower, upper
