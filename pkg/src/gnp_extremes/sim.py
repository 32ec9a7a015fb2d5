"""Monte Carlo sampling of G(n, p) degree sequences.

Each trial draws from its own counter-based Philox stream keyed by
``(seed, trial)``, so results are a function of ``(n, p, seed, trials)`` only
and do not depend on how trials are split across worker threads.

Two exact samplers are used, chosen by ``p``:

* dense (``min(p, q) >= SPARSE_CUTOFF``): 64 pairs per word, each word a
  vector of Bernoulli(p) bits assembled from the binary digits of ``p``;
* sparse: geometric skipping over the row-major pair index, on the
  complement graph when ``p > 1/2``.

The per-sample kernels come from the compiled ``_kernels`` extension when it
is importable, otherwise from the numpy ``_purepy`` module.  Set
``GNP_EXTREMES_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Sequence

import numpy as np

from . import _purepy
from .binom import normal_tail
from .bounds import ModelParams, normalization, poisson_pmf, poisson_sf, thresholds
from .errors import DomainError

try:
    if os.environ.get("GNP_EXTREMES_PURE_PYTHON"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

#: Below this ``min(p, 1 - p)`` the sparse geometric-skipping sampler is used.
SPARSE_CUTOFF = 1.0 / 16.0

# stream lanes (third Philox counter word)
LANE_GRAPH = 0
LANE_BOOTSTRAP = 1
LANE_NORMAL = 2

__all__ = [
    "BACKEND",
    "EmpiricalPmf",
    "SimConfig",
    "TrialSummary",
    "count_exceedances",
    "empirical_tvd",
    "get_kernels",
    "mc_extreme_cdf",
    "mc_wn_pmf",
    "mc_wn_pmf_at",
    "mth_largest",
    "normal_baseline",
    "run_normal_trials",
    "run_trials",
    "sample_degrees",
    "trial_rng",
    "tvd_bootstrap_se",
]


def get_kernels(backend: str | None = None):
    """Kernel module for ``backend`` ("compiled", "python" or None for the default)."""
    if backend is None:
        backend = BACKEND
    if backend == "python":
        return _purepy
    if backend == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available in this build")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")


def trial_rng(seed: int, trial: int, lane: int = LANE_GRAPH) -> np.random.Generator:
    """Independent Philox stream for one trial."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, lane, int(trial)]))


def _binary_digits(p: float) -> np.ndarray:
    """Binary digits of the double ``p`` (``digits[d]`` weighs ``2^-(d+1)``)."""
    num, den = Fraction(p).as_integer_ratio()
    width = den.bit_length() - 1
    return np.array([(num >> (width - 1 - d)) & 1 for d in range(width)], dtype=np.uint8)


def _sparse_degrees(n: int, p: float, rng: np.random.Generator, kern) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    pairs = n * (n - 1) // 2
    expected = pairs * p
    block = int(min(max(expected + 4.0 * math.sqrt(expected) + 16, 16), 1 << 20))
    i = j = 0
    while i < n - 1:
        gaps = rng.geometric(p, size=block).astype(np.int64, copy=False)
        i, j = kern.walk_gaps(gaps, n, i, j, out)
        block = 1 << 16
    return out


def sample_degrees(n: int, p: float, rng: np.random.Generator,
                   backend: str | None = None) -> np.ndarray:
    """Degree sequence of one G(n, p) sample, in expected O(n + edges) time."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    n = int(n)
    kern = get_kernels(backend)
    if min(p, 1.0 - p) < SPARSE_CUTOFF:
        if p <= 0.5:
            return _sparse_degrees(n, p, rng, kern)
        return (n - 1) - _sparse_degrees(n, 1.0 - p, rng, kern)
    out = np.zeros(n, dtype=np.int64)
    kern.dense_degrees(rng.bit_generator, n, _binary_digits(p), out)
    return out


def count_exceedances(degrees: np.ndarray, y: float) -> int:
    """Number of vertices with degree strictly above ``y``."""
    return int(np.count_nonzero(np.asarray(degrees) > y))


def mth_largest(degrees: np.ndarray, m: int) -> int:
    """``m``-th largest entry, by selection."""
    degrees = np.asarray(degrees)
    n = degrees.size
    if int(m) != m or not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}], got {m!r}")
    return int(np.partition(degrees, n - m)[n - m])


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass
class EmpiricalPmf:
    """Sampled law of ``W_n``: ``counts[k]`` trials had ``W_n = k``."""

    counts: np.ndarray
    trials: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if int(self.counts.sum()) != self.trials:
            raise ValueError("counts do not sum to trials")

    @classmethod
    def from_samples(cls, w: np.ndarray) -> "EmpiricalPmf":
        w = np.asarray(w, dtype=np.int64)
        return cls(np.bincount(w, minlength=1), int(w.size))

    @property
    def probs(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def stderr(self) -> np.ndarray:
        p = self.probs
        return np.sqrt(p * (1.0 - p) / self.trials)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "counts": self.counts.tolist(),
            "probs": self.probs.tolist(),
            "stderr": self.stderr.tolist(),
        }


@dataclass
class TrialSummary:
    """Per-trial reductions of the sampled degree sequences."""

    exceed: np.ndarray  # (trials, len(ys)) exceedance counts
    top: np.ndarray  # (trials, kmax) largest values, decreasing
    duality_violations: int = 0
    checked: int = field(default=0)


def _summarize(values: np.ndarray, ys: Sequence[float], kmax: int, check: bool,
               exceed_row: np.ndarray, top_row: np.ndarray) -> int:
    for idx, y in enumerate(ys):
        exceed_row[idx] = np.count_nonzero(values > y)
    if not (kmax or check):
        return 0
    desc = np.sort(values)[::-1]
    top_row[:] = desc[:kmax]
    if not check:
        return 0
    ranks = np.arange(values.size)
    bad = 0
    for idx, y in enumerate(ys):
        # d_{m:n} <= y  <=>  W_n <= m - 1, for every m
        bad += int(np.count_nonzero((desc <= y) != (ranks >= exceed_row[idx])))
    return bad


def _graph_chunk(lo, hi, *, n, p, seed, ys, kmax, check, backend):
    exceed = np.zeros((hi - lo, len(ys)), dtype=np.int64)
    top = np.zeros((hi - lo, kmax), dtype=np.int64)
    bad = 0
    for row, trial in enumerate(range(lo, hi)):
        deg = sample_degrees(n, p, trial_rng(seed, trial), backend)
        bad += _summarize(deg, ys, kmax, check, exceed[row], top[row])
    return exceed, top, bad


def _normal_chunk(lo, hi, *, n, seed, ys, kmax, check):
    exceed = np.zeros((hi - lo, len(ys)), dtype=np.int64)
    top = np.zeros((hi - lo, kmax), dtype=np.float64)
    bad = 0
    for row, trial in enumerate(range(lo, hi)):
        xi = trial_rng(seed, trial, LANE_NORMAL).standard_normal(n)
        bad += _summarize(xi, ys, kmax, check, exceed[row], top[row])
    return exceed, top, bad


def _run(chunk, trials: int, workers: int, check: bool) -> TrialSummary:
    # Trials are independent streams, so any split gives identical results.
    if workers <= 1 or trials < 2:
        parts = [chunk(0, trials)]
    else:
        edges = np.linspace(0, trials, min(trials, 4 * workers) + 1).astype(int)
        spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda span: chunk(*span), spans))
    exceed = np.concatenate([part[0] for part in parts])
    top = np.concatenate([part[1] for part in parts])
    bad = sum(part[2] for part in parts)
    return TrialSummary(exceed, top, bad, trials if check else 0)


def run_trials(n: int, p: float, seed: int, trials: int, ys: Sequence[float] = (),
               kmax: int = 0, workers: int = 1, check_duality: bool = False,
               backend: str | None = None) -> TrialSummary:
    """Sample ``trials`` graphs and reduce each to exceedance counts and top degrees.

    ``exceed[t, a]`` is ``W_n`` at threshold ``ys[a]`` for trial ``t``;
    ``top[t, :]`` holds the ``kmax`` largest degrees.  With
    ``check_duality`` every sample is also checked for
    ``d_{m:n} <= y  <=>  W_n <= m - 1`` over all ``m`` and all ``ys``.
    """
    if kmax > n:
        raise DomainError("kmax exceeds n")
    chunk = partial(_graph_chunk, n=n, p=p, seed=seed, ys=list(ys), kmax=kmax,
                    check=check_duality, backend=backend)
    return _run(chunk, trials, workers, check_duality)


def run_normal_trials(n: int, seed: int, trials: int, xs: Sequence[float] = (),
                      kmax: int = 0, workers: int = 1, check_duality: bool = False) -> TrialSummary:
    """Same reductions as ``run_trials`` for ``n`` i.i.d. standard normals per trial."""
    if kmax > n:
        raise DomainError("kmax exceeds n")
    chunk = partial(_normal_chunk, n=n, seed=seed, ys=list(xs), kmax=kmax,
                    check=check_duality)
    return _run(chunk, trials, workers, check_duality)


def mc_wn_pmf_at(n: int, p: float, y: float, trials: int, seed: int = 0,
                 workers: int = 1, backend: str | None = None) -> EmpiricalPmf:
    """Empirical law of ``W_n`` at raw-degree threshold ``y``."""
    summary = run_trials(n, p, seed, trials, [y], workers=workers, backend=backend)
    return EmpiricalPmf.from_samples(summary.exceed[:, 0])


def mc_wn_pmf(config: SimConfig) -> EmpiricalPmf:
    params = config.params
    return mc_wn_pmf_at(params.n, params.p, thresholds(params).y, config.trials,
                        config.seed, config.workers)


def empirical_tvd(pmf: EmpiricalPmf, lam: float) -> float:
    """Total variation distance from ``pmf`` to Poisson(``lam``), tail mass included."""
    if lam < 0:
        raise DomainError("lam must be >= 0")
    probs = pmf.probs
    diffs = [abs(pk - poisson_pmf(lam, k)) for k, pk in enumerate(probs)]
    return 0.5 * (math.fsum(diffs) + poisson_sf(lam, probs.size - 1))


def tvd_bootstrap_se(w: np.ndarray, lam: float, seed: int = 0, blocks: int = 100,
                     reps: int = 200) -> float:
    """Block-bootstrap standard error of ``empirical_tvd``.

    Trials (in trial order) are cut into ``blocks`` contiguous blocks that
    are resampled with replacement ``reps`` times.
    """
    w = np.asarray(w, dtype=np.int64)
    blocks = min(blocks, w.size)
    if blocks < 2:
        return math.nan
    size = int(w.max()) + 1
    cuts = np.array_split(w, blocks)
    block_counts = np.stack([np.bincount(c, minlength=size) for c in cuts])
    rng = trial_rng(seed, 0, LANE_BOOTSTRAP)
    values = np.empty(reps)
    for rep in range(reps):
        pick = rng.integers(0, blocks, size=blocks)
        counts = block_counts[pick].sum(axis=0)
        values[rep] = empirical_tvd(EmpiricalPmf(counts, int(counts.sum())), lam)
    return float(values.std(ddof=1))


def mc_extreme_cdf(config: SimConfig, m: int, t_grid: Sequence[float]) -> np.ndarray:
    """Empirical ``P(d_{m:n} <= y(t))`` for each level in ``t_grid`` (one pass)."""
    params = config.params
    if not 1 <= m <= params.n:
        raise DomainError(f"m must lie in [1, {params.n}]")
    ys = [thresholds(ModelParams(params.n, params.p, t, m)).y for t in t_grid]
    summary = run_trials(params.n, params.p, config.seed, config.trials, ys, kmax=m,
                         workers=config.workers)
    order = summary.top[:, m - 1]
    return np.array([np.mean(order <= y) for y in ys])


def normal_baseline(n: int, m: int, trials: int, seed: int = 0,
                    t_grid: Sequence[float] = (0.0,), workers: int = 1) -> np.ndarray:
    """Empirical ``P(xi_{m:n} <= a_n t + b_n)`` for i.i.d. standard normals."""
    if not 1 <= m <= n:
        raise DomainError(f"m must lie in [1, {n}]")
    a_n, b_n = normalization(n)
    xs = [a_n * t + b_n for t in t_grid]
    summary = run_normal_trials(n, seed, trials, xs, kmax=m, workers=workers)
    order = summary.top[:, m - 1]
    return np.array([np.mean(order <= x) for x in xs])


def normal_exceedance_prob(n: int, t: float) -> float:
    """``P(xi > a_n t + b_n)`` for one standard normal."""
    a_n, b_n = normalization(n)
    return normal_tail(a_n * t + b_n)
