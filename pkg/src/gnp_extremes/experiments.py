"""Canonical experiments behind the command-line subcommands.

Each builder returns plain Python data (lists of row dicts, or a nested
report dict) that depends only on its arguments, so formatting and
reproducibility live in one place and the test suite can call the same
protocol in-process.
"""
from __future__ import annotations

import math
import re
from typing import Callable, Sequence

import numpy as np

from .binom import normal_tail
from .bounds import (
    ModelParams,
    bound_report,
    cov_exact,
    cramer_gap,
    limit_cdf,
    moment_bounds,
    normalization,
    poisson_cdf,
    utvd_exact_at,
)
from .errors import DomainError
from .oracle import enumerate_wn_pmf, exact_cov, exact_tvd_to_poisson
from .sim import (
    EmpiricalPmf,
    empirical_tvd,
    run_normal_trials,
    run_trials,
    tvd_bootstrap_se,
)

DEFAULT_T_GRID = (-2.0, -1.0, 0.0, 1.0, 2.0)
DEFAULT_M_GRID = (1, 2, 3)
DEFAULT_RATE_NS = (1_000, 10_000, 100_000, 1_000_000)

_SCHEDULE = re.compile(
    r"^\s*(?:(?P<c>[-+0-9.eE]+)\s*\*\s*)?n\s*(?:\^|\*\*)\s*\(?(?P<a>[-+0-9.eE]+)\)?\s*$")


def parse_schedule(text: str) -> Callable[[int], float]:
    """Edge-probability schedule ``c * n^a`` from text such as ``"n^-0.25"``."""
    match = _SCHEDULE.match(text)
    if match is None:
        raise DomainError(f"cannot parse p schedule {text!r}; expected 'n^a' or 'c*n^a'")
    try:
        c = float(match["c"]) if match["c"] else 1.0
        a = float(match["a"])
    except ValueError as exc:
        raise DomainError(f"cannot parse p schedule {text!r}") from exc

    def schedule(n: int) -> float:
        return c * float(n) ** a

    schedule.text = text.strip()
    return schedule


def edge_prob(n: int, p: float | None, schedule: Callable[[int], float] | None) -> float:
    value = schedule(n) if schedule is not None else p
    if value is None or not 0.0 < value < 1.0:
        raise DomainError(f"edge probability {value!r} at n={n} is outside (0, 1)")
    return float(value)


# -- bounds -----------------------------------------------------------------

def bounds_rows(ns: Sequence[int], ts: Sequence[float], p: float | None = None,
                schedule: Callable[[int], float] | None = None,
                centerings: Sequence[str] = ("n-1",)) -> list[dict]:
    rows = []
    for n in ns:
        pn = edge_prob(n, p, schedule)
        for centering in centerings:
            for t in ts:
                report = bound_report(ModelParams(n, pn, t), warn=False, centering=centering)
                rows.append({"centering": centering, **report.as_row()})
    return rows


# -- rate -------------------------------------------------------------------

RATE_METRICS = {
    # column -> target value the column should approach
    "utvd_ratio": 1.0,
    "n_pi1_et": 1.0,
    "pi1_tail_ratio": 1.0,
    "cov_ratio": 1.0,
    "cramer_gap": 0.0,
}


def rate_rows(ns: Sequence[int], t: float, p: float | None = None,
              schedule: Callable[[int], float] | None = None) -> list[dict]:
    rows = []
    for n in ns:
        pn = edge_prob(n, p, schedule)
        report = bound_report(ModelParams(n, pn, t), warn=False)
        row = report.as_row()
        lam_limit = math.exp(-t)
        rows.append({
            "n": n,
            "p": pn,
            "t": t,
            "utvd_exact": report.utvd_exact,
            "utvd_asym": report.utvd_asym,
            "utvd_ratio": row["utvd_ratio"],
            "n_pi1_et": row["n_pi1_et"],
            "pi1_tail_ratio": report.pi1 / normal_tail(report.thresholds.x_n),
            "cov_ratio": row["cov_ratio"],
            "cramer_gap": cramer_gap(n, t),
            "rate_invariant": report.utvd_exact * n
            / (2.0 * math.log(n) * lam_limit * -math.expm1(-report.lam)),
            "low_npq": report.low_variance,
        })
    return rows


def rate_trend(rows: Sequence[dict]) -> dict | None:
    """First-versus-last deviation from the target for each rate metric.

    ``None`` when fewer than two sizes were evaluated.
    """
    if len(rows) < 2:
        return None
    verdict = {}
    for column, target in RATE_METRICS.items():
        first = abs(rows[0][column] - target)
        last = abs(rows[-1][column] - target)
        verdict[column] = {"first": first, "last": last, "improves": bool(last < first)}
    return verdict


# -- oracle -----------------------------------------------------------------

def default_y_grid(n: int) -> list[float]:
    """Half-integer thresholds ``-0.5, 0.5, ..., n - 0.5``."""
    return [k - 0.5 for k in range(n + 1)]


def oracle_rows(n: int, p: float, ys: Sequence[float] | None = None,
                rs: Sequence[int] = (1, 2)) -> list[dict]:
    """Oracle versus closed forms at each threshold ``y``.

    The moment check uses ``K = y + 1/2``, so that ``{d >= K} = {d > y}``
    on half-integer ``y``.
    """
    rows = []
    for y in (default_y_grid(n) if ys is None else ys):
        pmf = enumerate_wn_pmf(n, p, y)
        oracle_cov = exact_cov(n, p, y)
        closed_cov = cov_exact(n, p, y)
        tvd = exact_tvd_to_poisson(n, p, y)
        bound, degenerate = utvd_exact_at(n, p, y)
        row = {"n": n, "p": p, "y": y}
        for k, value in enumerate(pmf.probabilities):
            row[f"pmf_{k}"] = float(value)
        row.update({
            "exact_cov": oracle_cov,
            "cov_exact": closed_cov,
            "cov_delta": abs(oracle_cov - closed_cov),
            "exact_tvd": tvd,
            "utvd_exact": bound,
            "degenerate": degenerate,
            # a degenerate bound is reported as 0 while W = 0 almost surely
            "tvd_le_bound": bool(tvd <= bound or (degenerate and tvd <= 1e-15)),
        })
        moments_ok = True
        for r in rs:
            if r > n - 1:
                continue
            value = pmf.binomial_moment(r)
            lower, upper = moment_bounds(n, p, r, y + 0.5)
            row[f"moment_r{r}"] = value
            row[f"lower_r{r}"] = lower
            row[f"upper_r{r}"] = upper
            moments_ok &= lower <= value * (1 + 1e-12) and value <= upper * (1 + 1e-12)
        row["moment_ok"] = bool(moments_ok)
        rows.append(row)
    return rows


# -- simulate / baseline ----------------------------------------------------

def _cdf_stderr(prob: float, trials: int) -> float:
    return math.sqrt(prob * (1.0 - prob) / trials)


def _report(levels: Sequence[float], lams: Sequence[float], ts: Sequence[float],
            ms: Sequence[int], summary, trials: int, seed: int) -> dict:
    wn = []
    for idx, (t, level, lam) in enumerate(zip(ts, levels, lams)):
        counts = summary.exceed[:, idx]
        pmf = EmpiricalPmf.from_samples(counts)
        wn.append({
            "t": t,
            "level": level,
            "lambda_n": lam,
            "pmf": pmf.to_dict(),
            "tvd": empirical_tvd(pmf, lam),
            "tvd_se": tvd_bootstrap_se(counts, lam, seed),
        })
    extremes = []
    for m in ms:
        order = summary.top[:, m - 1]
        for t, level, lam in zip(ts, levels, lams):
            empirical = float(np.mean(order <= level))
            reference = poisson_cdf(lam, m - 1)
            limit = limit_cdf(m, t)
            extremes.append({
                "m": m,
                "t": t,
                "level": level,
                "empirical": empirical,
                "stderr": _cdf_stderr(empirical, trials),
                "poisson_ref": reference,
                "limit_cdf": limit,
                "err_poisson": abs(empirical - reference),
                "err_limit": abs(empirical - limit),
            })
    return {
        "wn": wn,
        "extremes": extremes,
        "duality_violations": summary.duality_violations,
        "duality_checked": summary.checked,
    }


def _check_sim_args(n: int, trials: int, ms: Sequence[int]) -> None:
    if int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if not ms or min(ms) < 1 or max(ms) > n:
        raise DomainError(f"every m must lie in [1, {n}]")


def simulate_report(n: int, p: float, ts: Sequence[float], ms: Sequence[int],
                    trials: int, seed: int = 0, workers: int = 1,
                    backend: str | None = None) -> dict:
    """Monte Carlo law of ``W_n`` and of the top degrees against the limit theory.

    Level ``t`` maps to the raw threshold ``y(t)``; the Poisson reference
    uses the exact ``lambda_n = n pi1`` at that threshold.
    """
    _check_sim_args(n, trials, ms)
    levels, lams = [], []
    for t in ts:
        report = bound_report(ModelParams(n, p, t), warn=False)
        levels.append(report.thresholds.y)
        lams.append(report.lam)
    summary = run_trials(n, p, seed, trials, levels, kmax=max(ms), workers=workers,
                         check_duality=True, backend=backend)
    return _report(levels, lams, ts, ms, summary, trials, seed)


def baseline_report(n: int, ts: Sequence[float], ms: Sequence[int], trials: int,
                    seed: int = 0, workers: int = 1) -> dict:
    """Same report as ``simulate_report`` for ``n`` i.i.d. standard normals."""
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n!r}")
    _check_sim_args(n, trials, ms)
    a_n, b_n = normalization(n)
    levels = [a_n * t + b_n for t in ts]
    lams = [n * normal_tail(x) for x in levels]
    summary = run_normal_trials(n, seed, trials, levels, kmax=max(ms), workers=workers,
                                check_duality=True)
    return _report(levels, lams, ts, ms, summary, trials, seed)


def extremes_rows(report: dict) -> list[dict]:
    """Flat table of a simulate/baseline report, one row per ``(m, t)``."""
    by_t = {entry["t"]: entry for entry in report["wn"]}
    rows = []
    for entry in report["extremes"]:
        wn = by_t[entry["t"]]
        rows.append({
            **entry,
            "lambda_n": wn["lambda_n"],
            "tvd": wn["tvd"],
            "tvd_se": wn["tvd_se"],
            "duality_violations": report["duality_violations"],
        })
    return rows


__all__ = [
    "DEFAULT_M_GRID",
    "DEFAULT_RATE_NS",
    "DEFAULT_T_GRID",
    "RATE_METRICS",
    "baseline_report",
    "bounds_rows",
    "default_y_grid",
    "edge_prob",
    "extremes_rows",
    "oracle_rows",
    "parse_schedule",
    "rate_rows",
    "rate_trend",
    "simulate_report",
]

