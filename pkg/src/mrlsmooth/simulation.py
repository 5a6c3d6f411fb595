"""Monte-Carlo comparison of the MRL estimators on known distributions.

Every replication draws from its own generator spawned from
``numpy.random.SeedSequence(seed)``, so results do not depend on the order in
which replications are executed, nor on the number of workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import stats

from .bandwidth import select_bandwidth_lscv
from .distributions import TrueDistribution, parse_distribution
from .estimators import (
    METHODS,
    EstimatorSpec,
    CurveEstimate,
    Sample,
    TAIL_DEGENERATE,
    evaluate_curve,
)
from .kernel import get_kernel
from .transform import transform_for_support

__all__ = [
    "ConfigError",
    "SimulationError",
    "EstimatorTemplate",
    "SimulationConfig",
    "SimulationReport",
    "BiasProfile",
    "NormalityResult",
    "sample_distribution",
    "true_mrl",
    "ise",
    "default_ise_range",
    "default_ase_points",
    "run_mc",
    "bias_profile",
    "sup_errors",
    "normality_diagnostic",
    "parse_config",
    "load_config",
]

MAX_FAILURE_RATE = 0.01


class ConfigError(ValueError):
    """Malformed simulation config."""


class SimulationError(RuntimeError):
    """Too many replications failed."""


@dataclass(frozen=True)
class EstimatorTemplate:
    """Estimator recipe; the bandwidth is either a number or ``"cv"``.

    ``transform=None`` picks probit for bounded supports and log otherwise.
    """

    method: str
    kernel: str = "epanechnikov"
    transform: str | None = None
    bandwidth: float | str = "cv"

    def __post_init__(self):
        method = self.method.lower()
        if method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        object.__setattr__(self, "method", method)
        get_kernel(self.kernel)
        bw = self.bandwidth
        if isinstance(bw, str):
            if bw.lower() != "cv":
                raise ValueError(f"bandwidth must be 'cv' or a positive number, got {bw!r}")
            object.__setattr__(self, "bandwidth", "cv")
        elif not (math.isfinite(bw) and bw > 0):
            raise ValueError(f"bandwidth must be positive, got {bw!r}")

    @property
    def label(self) -> str:
        return self.method


@dataclass(frozen=True)
class SimulationConfig:
    distribution: TrueDistribution
    n: int
    reps: int
    estimators: tuple = tuple(EstimatorTemplate(m) for m in METHODS)
    grid_points: int = 200
    ise_range: tuple[float, float] | None = None
    ase_points: tuple[float, ...] | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        if not self.estimators:
            raise ValueError("at least one estimator is needed")
        labels = [e.label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate estimators: {labels}")
        object.__setattr__(self, "estimators", tuple(self.estimators))
        rng = self.ise_range or default_ise_range(self.distribution)
        lo, hi = map(float, rng)
        sup = self.distribution.support
        if not (lo < hi and sup.contains(lo) and sup.contains(hi)):
            raise ValueError(f"ISE range [{lo:g}, {hi:g}] must lie strictly inside {sup}")
        object.__setattr__(self, "ise_range", (lo, hi))
        pts = self.ase_points
        pts = default_ase_points(self.distribution, (lo, hi)) if pts is None else tuple(map(float, pts))
        if not all(sup.contains(p) for p in pts):
            raise ValueError(f"ASE points {pts} must lie strictly inside {sup}")
        object.__setattr__(self, "ase_points", pts)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(*self.ise_range, self.grid_points)


class Stat(NamedTuple):
    value: float
    se: float


@dataclass
class SimulationReport:
    config: SimulationConfig
    aise: dict
    ase: dict
    failures: dict
    wall_time: float
    ise_values: dict = field(default_factory=dict, repr=False)

    @property
    def ise_range(self):
        return self.config.ise_range

    def rows(self):
        """Flat rows ``(estimator, metric, t, value, se)``."""
        out = []
        for label, st in self.aise.items():
            out.append((label, "AISE", math.nan, st.value, st.se))
            for t, pt in self.ase[label].items():
                out.append((label, "ASE", t, pt.value, pt.se))
        return out


class BiasProfile(NamedTuple):
    grid: np.ndarray
    bias: dict
    se: dict
    failures: dict


class NormalityResult(NamedTuple):
    skewness: float
    excess_kurtosis: float
    standardized_mean: float


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def sample_distribution(dist: TrueDistribution, n: int, rng: np.random.Generator) -> Sample:
    """Draw ``n`` observations strictly inside the support of ``dist``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Sample(dist.sample(rng, n), dist.support)


def true_mrl(dist: TrueDistribution, t):
    """Mean residual life of ``dist`` at ``t`` inside the support."""
    t_arr = np.asarray(t, dtype=float)
    if not np.all(dist.support.contains(t_arr)):
        raise ValueError(f"t must lie inside {dist.support}")
    out = dist.mrl(t_arr)
    return float(out) if np.ndim(t) == 0 else out


def default_ise_range(dist: TrueDistribution) -> tuple[float, float]:
    """``[lower + 1e-3 span, min(E + 3 sd, upper - 1e-3 span)]`` with
    ``span = min(upper - lower, E + 3 sd - lower)``."""
    lo, hi = dist.support.lower, dist.support.upper
    top = dist.mean + 3.0 * dist.std
    span = min(hi - lo, top - lo)
    return lo + 1e-3 * span, min(top, hi - 1e-3 * span)


def default_ase_points(dist: TrueDistribution, ise_range=None) -> tuple[float, float, float]:
    """``lower + 0.001``, the mean and ``E + 3 sd``; a point past the upper end
    is moved to the end of the ISE range."""
    ise_range = ise_range or default_ise_range(dist)
    lo = dist.support.lower
    pts = [lo + 1e-3, dist.mean, dist.mean + 3.0 * dist.std]
    return tuple(p if dist.support.contains(p) else ise_range[1] for p in pts)


def ise(curve: CurveEstimate, dist: TrueDistribution, range_=None) -> float:
    """Trapezoid rule of ``(m_hat - m)^2`` over the grid points inside
    ``range_``. Tail-degenerate points count with estimate 0."""
    grid = curve.grid
    if range_ is None:
        mask = np.ones(grid.size, dtype=bool)
    else:
        lo, hi = range_
        tol = 1e-12 * max(1.0, abs(hi - lo))
        mask = (grid >= lo - tol) & (grid <= hi + tol)
    if mask.sum() < 2:
        raise ValueError("curve grid does not cover the integration range")
    est = np.where(curve.flags == TAIL_DEGENERATE, 0.0, curve.mrl)[mask]
    if not np.all(np.isfinite(est)):
        raise FloatingPointError("curve has invalid points inside the integration range")
    err = (est - dist.mrl(grid[mask])) ** 2
    return float(np.trapezoid(err, grid[mask]))


def _mean_se(x: np.ndarray) -> Stat:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return Stat(math.nan, math.nan)
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return Stat(float(np.mean(x)), se)


# ---------------------------------------------------------------------------
# replication engine
# ---------------------------------------------------------------------------

def _specs_for_sample(config: SimulationConfig, sample: Sample):
    cache = {}
    specs = []
    for tpl in config.estimators:
        tr = None
        if tpl.method.startswith("transformed"):
            tr = transform_for_support(sample.support, tpl.transform)
        h = None
        if tpl.method != "empirical":
            h = tpl.bandwidth
            if h == "cv":
                # naive smooths on the data scale
                key = (tpl.kernel, tr.name if tr is not None else "identity")
                if key not in cache:
                    cache[key] = select_bandwidth_lscv(sample, tr, tpl.kernel)
                h = cache[key]
        specs.append(EstimatorSpec(tpl.method, tpl.kernel, tr, h))
    return specs


def _one_replication(config: SimulationConfig, seed_seq, points):
    """MRL estimates at ``points`` for every estimator, NaN on failure."""
    rng = np.random.default_rng(seed_seq)
    sample = sample_distribution(config.distribution, config.n, rng)
    out = np.full((len(config.estimators), points.size), np.nan)
    try:
        specs = _specs_for_sample(config, sample)
    except (ValueError, FloatingPointError, ArithmeticError):
        return out
    for k, spec in enumerate(specs):
        try:
            curve = evaluate_curve(spec, sample, points)
        except (ValueError, FloatingPointError, ArithmeticError):
            continue
        out[k] = np.where(curve.flags == TAIL_DEGENERATE, 0.0, curve.mrl)
    return out


def _run_chunk(config, seeds, points):
    return [_one_replication(config, s, points) for s in seeds]


def _collect(config: SimulationConfig, points: np.ndarray):
    """Array of shape ``(reps, estimators, points)`` and per-estimator failure
    counts. Raises if any estimator fails in more than 1% of replications."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.reps)
    if config.workers > 1 and config.reps > 1:
        chunks = np.array_split(np.arange(config.reps), config.workers)
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futs = [pool.submit(_run_chunk, config, [seeds[i] for i in c], points) for c in chunks if c.size]
            results = [r for f in futs for r in f.result()]
    else:
        results = _run_chunk(config, seeds, points)
    est = np.stack(results)
    failed = ~np.all(np.isfinite(est), axis=2)
    failures = {tpl.label: int(failed[:, k].sum()) for k, tpl in enumerate(config.estimators)}
    worst = max(failures.values())
    if worst > MAX_FAILURE_RATE * config.reps:
        raise SimulationError(
            f"estimator failures exceed {MAX_FAILURE_RATE:.0%} of {config.reps} replications: {failures}"
        )
    return est, failed, failures


def run_mc(config: SimulationConfig) -> SimulationReport:
    """AISE over the ISE range and ASE at the anchor points for each estimator.

    Standard errors are ``sd / sqrt(reps)`` of the replication-level errors
    (0 for a single replication). Failed replications are left out of the
    averages and counted in ``failures``.
    """
    start = time.perf_counter()
    grid = config.grid
    anchors = np.asarray(config.ase_points)
    points = np.concatenate([grid, anchors])
    est, failed, failures = _collect(config, points)
    dist = config.distribution
    truth_grid = dist.mrl(grid)
    truth_anchor = dist.mrl(anchors)

    aise, ase, ise_values = {}, {}, {}
    for k, tpl in enumerate(config.estimators):
        good = ~failed[:, k]
        e = est[good, k, :]
        ises = np.trapezoid((e[:, : grid.size] - truth_grid) ** 2, grid, axis=1)
        ise_values[tpl.label] = ises
        aise[tpl.label] = _mean_se(ises)
        sq = (e[:, grid.size:] - truth_anchor) ** 2
        ase[tpl.label] = {float(t): _mean_se(sq[:, j]) for j, t in enumerate(anchors)}
    return SimulationReport(config, aise, ase, failures, time.perf_counter() - start, ise_values)


def bias_profile(config: SimulationConfig, t_grid=None) -> BiasProfile:
    """Mean of ``m_hat(t) - m(t)`` over replications, with MC standard errors.

    ``t_grid`` defaults to the ISE grid of ``config``.
    """
    grid = config.grid if t_grid is None else np.asarray(t_grid, dtype=float).ravel()
    if not np.all(config.distribution.support.contains(grid)):
        raise ValueError("bias grid must lie inside the support")
    est, failed, failures = _collect(config, grid)
    truth = config.distribution.mrl(grid)
    bias, se = {}, {}
    for k, tpl in enumerate(config.estimators):
        err = est[~failed[:, k], k, :] - truth
        bias[tpl.label] = err.mean(axis=0)
        se[tpl.label] = (
            err.std(axis=0, ddof=1) / math.sqrt(err.shape[0]) if err.shape[0] > 1 else np.zeros(grid.size)
        )
    return BiasProfile(grid, bias, se, failures)


def sup_errors(config: SimulationConfig, t_grid) -> dict:
    """Per-replication ``max_t |m_hat(t) - m(t)|`` on ``t_grid`` for each estimator."""
    grid = np.asarray(t_grid, dtype=float).ravel()
    est, failed, _ = _collect(config, grid)
    truth = config.distribution.mrl(grid)
    return {
        tpl.label: np.max(np.abs(est[~failed[:, k], k, :] - truth), axis=1)
        for k, tpl in enumerate(config.estimators)
    }


def normality_diagnostic(config: SimulationConfig, t: float, estimator: str = "transformed2") -> NormalityResult:
    """Skewness and excess kurtosis of the replicated estimates at ``t``.

    ``standardized_mean`` is ``(mean - m(t)) / sd`` over the replications.
    These are descriptive; nothing is asserted here.
    """
    if config.reps < 1000:
        raise ValueError(f"normality diagnostic needs reps >= 1000, got {config.reps}")
    labels = [tpl.label for tpl in config.estimators]
    if estimator not in labels:
        raise ValueError(f"estimator {estimator!r} is not in the config ({labels})")
    k = labels.index(estimator)
    est, failed, _ = _collect(config, np.array([float(t)]))
    x = est[~failed[:, k], k, 0]
    sd = float(np.std(x, ddof=1))
    return NormalityResult(
        float(stats.skew(x)),
        float(stats.kurtosis(x)),
        (float(np.mean(x)) - true_mrl(config.distribution, t)) / sd,
    )


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_KEYS = {
    "distribution", "distributions", "n", "reps", "seed", "estimators", "kernel",
    "transform", "bandwidth", "grid_points", "ise_min", "ise_max", "ase_points",
    "workers", "mode",
}
MODES = ("aise", "bias")


def parse_config(text: str, source: str = "<config>") -> tuple[str, list[SimulationConfig]]:
    """Parse ``key = value`` lines into ``(mode, configs)``.

    One config is built per entry of ``distributions`` (separated by ``;``).
    Lines starting with ``#`` are comments. Recognised keys: ``distributions``,
    ``n``, ``reps``, ``seed``, ``estimators`` (comma separated), ``kernel``,
    ``transform`` (``auto``, ``log``, ``probit``), ``bandwidth`` (``cv`` or a
    number), ``grid_points``, ``ise_min``, ``ise_max``, ``ase_points``,
    ``workers`` and ``mode`` (``aise`` or ``bias``).
    """
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)
    if not raw:
        raise ConfigError(f"{source}: config is empty")

    def get(key, conv, default=None):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            return conv(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None

    def need(key):
        if key not in raw:
            raise ConfigError(f"{source}: missing required key {key!r}")

    if "distribution" in raw and "distributions" in raw:
        raise ConfigError(f"{source}: give either 'distribution' or 'distributions'")
    dkey = "distributions" if "distributions" in raw else "distribution"
    need(dkey)
    need("n")
    need("reps")
    dists = get(dkey, lambda v: [parse_distribution(d) for d in v.split(";") if d.strip()])
    if not dists:
        raise ConfigError(f"{source}:{raw[dkey][1]}: no distributions given")

    mode = get("mode", lambda v: v.lower(), "aise")
    if mode not in MODES:
        raise ConfigError(f"{source}:{raw['mode'][1]}: mode must be one of {MODES}")
    kernel = get("kernel", lambda v: get_kernel(v).family, "epanechnikov")
    transform = get("transform", lambda v: None if v.lower() == "auto" else v.lower(), None)

    def bandwidth(v):
        return "cv" if v.lower() == "cv" else float(v)

    bw = get("bandwidth", bandwidth, "cv")
    methods = get("estimators", lambda v: [m.strip() for m in v.split(",") if m.strip()], list(METHODS))
    try:
        templates = tuple(EstimatorTemplate(m, kernel, transform, bw) for m in methods)
    except ValueError as exc:
        line = raw.get("estimators", raw.get("bandwidth", ("", 0)))[1]
        raise ConfigError(f"{source}:{line}: {exc}") from None

    floats = lambda v: tuple(float(p) for p in v.split(","))  # noqa: E731
    common = dict(
        n=get("n", int),
        reps=get("reps", int),
        seed=get("seed", int, 0),
        grid_points=get("grid_points", int, 200),
        workers=get("workers", int, 1),
        ase_points=get("ase_points", floats, None),
    )
    ise_min = get("ise_min", float)
    ise_max = get("ise_max", float)

    configs = []
    for dist in dists:
        lo, hi = default_ise_range(dist)
        rng = (lo if ise_min is None else ise_min, hi if ise_max is None else ise_max)
        try:
            configs.append(SimulationConfig(dist, estimators=templates, ise_range=rng, **common))
        except ValueError as exc:
            raise ConfigError(f"{source}: {dist}: {exc}") from None
    return mode, configs


def load_config(path) -> tuple[str, list[SimulationConfig]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))
