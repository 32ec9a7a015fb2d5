"""Extreme degrees of Erdos-Renyi random graphs G(n, p).

Closed-form Stein-Chen quantities (``bounds``), stable binomial and normal
primitives (``binom``), exact small-graph laws by enumeration (``oracle``)
and fast Monte Carlo of degree sequences (``sim``).
"""
__version__ = "0.1.0"

from .binom import (  # noqa: E402
    BinomialSpec,
    berry_esseen_bound,
    binom_pmf,
    binom_tail,
    local_clt_pmf,
    log_binom_pmf,
    mills_tail_approx,
    normal_cdf,
    normal_tail,
    uspensky_local,
)
from .bounds import (  # noqa: E402
    BoundReport,
    ModelParams,
    ThresholdSet,
    bound_report,
    cov_asymptotic,
    cov_exact,
    cramer_threshold,
    limit_cdf,
    moment_bounds,
    normalization,
    pi1,
    poisson_pmf,
    thresholds,
    utvd_asymptotic,
    utvd_exact,
)
from .errors import DomainError, PreconditionError  # noqa: E402
from .oracle import (  # noqa: E402
    OraclePmf,
    enumerate_order_stat_pmf,
    enumerate_wn_pmf,
    exact_cov,
    exact_moment,
    exact_tvd_to_poisson,
)
from .sim import BACKEND, EmpiricalPmf, SimConfig, sample_degrees  # noqa: E402

__all__ = [
    "BACKEND",
    "BinomialSpec",
    "BoundReport",
    "DomainError",
    "EmpiricalPmf",
    "ModelParams",
    "OraclePmf",
    "PreconditionError",
    "SimConfig",
    "ThresholdSet",
    "__version__",
    "berry_esseen_bound",
    "binom_pmf",
    "binom_tail",
    "bound_report",
    "cov_asymptotic",
    "cov_exact",
    "cramer_threshold",
    "enumerate_order_stat_pmf",
    "enumerate_wn_pmf",
    "exact_cov",
    "exact_moment",
    "exact_tvd_to_poisson",
    "limit_cdf",
    "local_clt_pmf",
    "log_binom_pmf",
    "mills_tail_approx",
    "moment_bounds",
    "normal_cdf",
    "normal_tail",
    "normalization",
    "pi1",
    "poisson_pmf",
    "sample_degrees",
    "thresholds",
    "uspensky_local",
    "utvd_asymptotic",
    "utvd_exact",
]
