"""Binomial and normal primitives.

The binomial pmf follows Loader's saddle-point formulation (Stirling error
terms plus the deviance ``bd0``), which keeps the relative error near machine
precision even when ``n`` is of order ``1e8``.  Tail probabilities use the
strict event ``{B > y}`` for a real threshold ``y`` throughout the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, erfcx

from .errors import DomainError, PreconditionError

__all__ = [
    "BERRY_ESSEEN_C",
    "BinomialSpec",
    "berry_esseen_bound",
    "binom_pmf",
    "binom_tail",
    "local_clt_pmf",
    "log_binom_pmf",
    "log_mills_tail_approx",
    "log_normal_tail",
    "mills_tail_approx",
    "normal_cdf",
    "normal_tail",
    "uspensky_local",
    "uspensky_w",
]

LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
LN_2PI = math.log(2.0 * math.pi)

#: Optimal Berry-Esseen constant for the binomial law, ``(sqrt(10)+3)/(6 sqrt(2 pi))``.
BERRY_ESSEEN_C = (math.sqrt(10.0) + 3.0) / (6.0 * math.sqrt(2.0 * math.pi))

#: Trials above which ``binom_tail`` switches to the incomplete-beta route.
DIRECT_SUM_MAX_TRIALS = 10_000
CENTRAL_WINDOW_SD = 6.0

# stirlerr(k/2) for k = 0..30, evaluated at 40 digits.
_SFERR_HALVES = (
    0.0,
    0.15342640972002734529,
    0.08106146679532725822,
    0.054814121051917653896,
    0.041340695955409294094,
    0.033162873519936287485,
    0.027677925684998339149,
    0.023746163656297495971,
    0.020790672103765093112,
    0.018488450532673185231,
    0.016644691189821192163,
    0.015134973221917378874,
    0.013876128823070747999,
    0.012810465242920226924,
    0.011896709945891770095,
    0.011104559758206917327,
    0.010411265261972096497,
    0.0097994161261588032984,
    0.0092554621827127329177,
    0.008768700134139385463,
    0.0083305634333628712565,
    0.0079341145643140205472,
    0.007573675487951840795,
    0.0072445543013203831795,
    0.0069428401072095298657,
    0.0066652470327076824424,
    0.0064089941880042070684,
    0.0061717122630394576475,
    0.0059513701127588477356,
    0.005746216513010115682,
    0.005554733551962801371,
)

_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


@dataclass(frozen=True)
class BinomialSpec:
    """Binomial law ``Bin(trials, success_prob)``."""

    trials: int
    success_prob: float

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 0:
            raise DomainError(f"trials must be a nonnegative integer, got {self.trials!r}")
        if not 0.0 < self.success_prob < 1.0:
            raise DomainError(f"success_prob must lie in (0, 1), got {self.success_prob!r}")
        object.__setattr__(self, "trials", int(self.trials))

    @property
    def failure_prob(self) -> float:
        return 1.0 - self.success_prob

    @property
    def mean(self) -> float:
        return self.trials * self.success_prob

    @property
    def variance(self) -> float:
        return self.trials * self.success_prob * (1.0 - self.success_prob)


def _stirlerr(n: float) -> float:
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)``."""
    if n <= 15.0:
        nn = n + n
        if nn == int(nn):
            return _SFERR_HALVES[int(nn)]
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - LN_SQRT_2PI
    nn = n * n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """``a * b`` as an unevaluated sum ``hi + lo`` (Dekker)."""
    hi = a * b
    ca = 134217729.0 * a
    ah = ca - (ca - a)
    al = a - ah
    cb = 134217729.0 * b
    bh = cb - (cb - b)
    bl = b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def _centres(n: int, p: float) -> tuple[float, float, float, float]:
    """``n p`` and ``n - n p``, each as an unevaluated ``hi + lo`` pair."""
    mu, mu_lo = _two_prod(float(n), p)
    nu = n - mu
    bb = nu - n
    err = (n - (nu - bb)) + (-mu - bb)
    return mu, mu_lo, nu, err - mu_lo


def _bd0(x: float, mu: float, mu_lo: float = 0.0) -> float:
    """Deviance term ``x log(x/mu) + mu - x`` without cancellation.

    ``mu_lo`` carries the rounding error of ``mu``; near the centre the
    deviance is sensitive to it at the 1e-12 level once ``n ~ 1e8``.
    """
    d = (x - mu) - mu_lo
    if abs(d) < 0.1 * (x + mu):
        v = d / (x + mu)
        s = d * v
        if abs(s) < 2.2250738585072014e-308:
            return s
        ej = 2.0 * x * v
        v *= v
        for j in range(1, 1000):
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
    return x * math.log(x / mu) + (mu - x) + mu_lo


def log_binom_pmf(spec: BinomialSpec, k: int) -> float:
    """Natural log of ``P(B = k)`` for ``B ~ spec``."""
    n = spec.trials
    p = spec.success_prob
    if int(k) != k or not 0 <= k <= n:
        raise DomainError(f"k must be an integer in [0, {n}], got {k!r}")
    k = int(k)
    if k == 0:
        if n == 0:
            return 0.0
        return n * math.log1p(-p)
    if k == n:
        return n * math.log(p)
    mu, mu_lo, nu, nu_lo = _centres(n, p)
    lc = (_stirlerr(n) - _stirlerr(k) - _stirlerr(n - k)
          - _bd0(k, mu, mu_lo) - _bd0(n - k, nu, nu_lo))
    lf = LN_2PI + math.log(k) + math.log1p(-k / n)
    return lc - 0.5 * lf


def binom_pmf(spec: BinomialSpec, k: int) -> float:
    """``P(B = k)``; zero outside the support."""
    if int(k) != k or not 0 <= k <= spec.trials:
        return 0.0
    return math.exp(log_binom_pmf(spec, k))


def _stirlerr_vec(k: np.ndarray) -> np.ndarray:
    k = k.astype(np.float64)
    out = np.empty_like(k)
    small = k <= 15.0
    out[small] = np.asarray(_SFERR_HALVES)[(2.0 * k[small]).astype(np.int64)]
    big = ~small
    kb = k[big]
    nn = kb * kb
    series = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / kb
    out[big] = series
    return out


def _bd0_vec(x: np.ndarray, mu: float, mu_lo: float) -> np.ndarray:
    x = x.astype(np.float64)
    d = (x - mu) - mu_lo
    out = x * np.log(x / mu) + (mu - x) + mu_lo
    near = np.abs(d) < 0.1 * (x + mu)
    if near.any():
        xn = x[near]
        dn = d[near]
        v = dn / (xn + mu)
        s = dn * v
        ej = 2.0 * xn * v
        v2 = v * v
        # |v| < 0.1 here, so each further term is 100x smaller
        for j in range(1, 14):
            ej = ej * v2
            s = s + ej / (2 * j + 1)
        out[near] = s
    return out


def _log_pmf_vec(n: int, p: float, ks: np.ndarray) -> np.ndarray:
    # Vectorized Loader pmf for interior support points 0 < k < n.
    mu, mu_lo, nu, nu_lo = _centres(n, p)
    lc = (_stirlerr(n) - _stirlerr_vec(ks) - _stirlerr_vec(n - ks)
          - _bd0_vec(ks, mu, mu_lo) - _bd0_vec(n - ks, nu, nu_lo))
    lf = LN_2PI + np.log(ks) + np.log1p(-ks / n)
    return lc - 0.5 * lf


def _pmf_range(n: int, p: float, lo: int, hi: int) -> np.ndarray:
    ks = np.arange(lo, hi + 1)
    out = np.empty(ks.size)
    inner = (ks > 0) & (ks < n)
    out[inner] = np.exp(_log_pmf_vec(n, p, ks[inner]))
    spec = BinomialSpec(n, p)
    for k in (0, n):
        if lo <= k <= hi:
            out[k - lo] = binom_pmf(spec, k)
    return out


def _tail_direct(n: int, p: float, k0: int) -> float:
    # P(B >= k0) for 1 <= k0 <= n, summing the side of k0 away from the mode
    # over a window wide enough that the omitted terms are below 1e-30.
    sd = math.sqrt(n * p * (1.0 - p))
    span = int(12.0 * sd) + 64
    mode = min(int((n + 1) * p), n)
    if k0 > mode:
        terms = _pmf_range(n, p, k0, min(n, k0 + span))
        return min(math.fsum(terms), 1.0)
    terms = _pmf_range(n, p, max(0, k0 - 1 - span), k0 - 1)
    return max(1.0 - math.fsum(terms), 0.0)


_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    maxit = 20 * int(math.sqrt(max(a, b))) + 1000
    for m in range(1, maxit + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 2e-16:
            return h
    raise RuntimeError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def _tail_betacf(n: int, p: float, k0: int) -> float:
    # P(B >= k0) = I_p(k0, n - k0 + 1); the prefactors are binomial pmf values.
    q = 1.0 - p
    spec = BinomialSpec(n, p)
    a = float(k0)
    b = float(n - k0 + 1)
    if p < (a + 1.0) / (a + b + 2.0):
        return q * binom_pmf(spec, k0) * _betacf(a, b, p)
    lower = p * binom_pmf(spec, k0 - 1) * _betacf(b, a, q)
    return max(1.0 - lower, 0.0)


def binom_tail(spec: BinomialSpec, threshold: float) -> float:
    """Strict upper tail ``P(B > threshold)`` for a real threshold.

    Binomials with at most ``DIRECT_SUM_MAX_TRIALS`` trials are summed
    directly (compensated summation of the side of the threshold away from
    the mode).  Larger ones go through the regularized incomplete beta
    continued fraction, except for thresholds within ``CENTRAL_WINDOW_SD``
    standard deviations of the mean: there the fraction needs O(sqrt(n))
    iterations and its rounding drift exceeds 1e-13, so those are summed
    directly as well.
    """
    n = spec.trials
    if math.isnan(threshold):
        raise DomainError("threshold is NaN")
    if threshold < 0:
        return 1.0
    if threshold >= n:
        return 0.0
    k0 = math.floor(threshold) + 1
    p = spec.success_prob
    if n <= DIRECT_SUM_MAX_TRIALS:
        return _tail_direct(n, p, k0)
    z = (k0 - 0.5 - n * p) / math.sqrt(n * p * (1.0 - p))
    if abs(z) < CENTRAL_WINDOW_SD:
        return _tail_direct(n, p, k0)
    return _tail_betacf(n, p, k0)


def _exp_neg_half_square(x: float) -> float:
    # exp(-x^2/2) with x^2 split exactly (Veltkamp), so the rounding of x*x
    # does not get amplified by the exponential for large |x|.
    c = 134217729.0 * x
    hi = c - (c - x)
    lo = x - hi
    sq = x * x
    err = ((hi * hi - sq) + 2.0 * hi * lo) + lo * lo
    return math.exp(-0.5 * sq) * (1.0 - 0.5 * err)


def normal_tail(x: float) -> float:
    """Standard normal upper tail ``1 - Phi(x)``, computed without cancellation."""
    if x < 0.5:
        return 0.5 * float(erfc(x / math.sqrt(2.0)))
    return 0.5 * float(erfcx(x / math.sqrt(2.0))) * _exp_neg_half_square(x)


def normal_cdf(x: float) -> float:
    """Standard normal CDF ``Phi(x)``."""
    return normal_tail(-x)


def log_normal_tail(x: float) -> float:
    """``log(1 - Phi(x))``, finite far beyond the double underflow point."""
    if x < 0.5:
        return math.log(normal_tail(x))
    return math.log(0.5 * float(erfcx(x / math.sqrt(2.0)))) - 0.5 * x * x


def mills_tail_approx(x: float) -> float:
    """Mills-ratio approximation ``phi(x) / x`` to the normal upper tail."""
    if not x > 0:
        raise DomainError(f"mills_tail_approx needs x > 0, got {x!r}")
    return math.exp(-0.5 * x * x - LN_SQRT_2PI) / x


def log_mills_tail_approx(x: float) -> float:
    """``log(phi(x) / x)``; use where ``mills_tail_approx`` would underflow."""
    if not x > 0:
        raise DomainError(f"log_mills_tail_approx needs x > 0, got {x!r}")
    return -0.5 * x * x - LN_SQRT_2PI - math.log(x)


def local_clt_pmf(spec: BinomialSpec, k: int) -> float:
    """de Moivre-Laplace density ``(2 pi npq)^{-1/2} exp(-(k-np)^2 / (2 npq))``."""
    var = spec.variance
    return math.exp(-((k - spec.mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def uspensky_local(spec: BinomialSpec, w: float) -> tuple[float, float]:
    """Uspensky's local expansion of ``P(B = np + w sqrt(npq))`` and its error bound.

    Returns ``(approx, delta_bound)`` with
    ``|P(B = np + w sqrt(npq)) - approx| < delta_bound``.  Valid only for
    ``npq >= 25`` and when ``np + w sqrt(npq)`` is a support point.
    """
    p = spec.success_prob
    q = spec.failure_prob
    npq = spec.variance
    if npq < 25.0:
        raise PreconditionError(f"Uspensky bound requires npq >= 25, got {npq:g}")
    k = spec.mean + w * math.sqrt(npq)
    if abs(k - round(k)) > 1e-7 * (1.0 + abs(k)) or not 0 <= round(k) <= spec.trials:
        raise DomainError(f"np + w*sqrt(npq) = {k!r} is not a support point")
    lead = math.exp(-0.5 * w * w) / math.sqrt(2.0 * math.pi * npq)
    approx = lead * (1.0 + (q - p) * (w ** 3 - 3.0 * w) / (6.0 * math.sqrt(npq)))
    delta = (0.15 + 0.25 * abs(p - q)) / npq ** 1.5 + math.exp(-1.5 * math.sqrt(npq))
    return approx, delta


def uspensky_w(spec: BinomialSpec, k: int) -> float:
    """Standardized offset ``w`` of the support point ``k``."""
    return (k - spec.mean) / math.sqrt(spec.variance)


def berry_esseen_bound(spec: BinomialSpec) -> float:
    """Uniform bound on ``|P((B - np)/sqrt(npq) > w) - (1 - Phi(w))|``."""
    n = spec.trials
    if n < 2:
        raise PreconditionError(f"Berry-Esseen bound stated for n >= 2, got n={n}")
    p = spec.success_prob
    q = spec.failure_prob
    return BERRY_ESSEEN_C * (p * p + q * q) / (math.sqrt(p * q) * math.sqrt(n))
