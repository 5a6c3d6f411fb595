"""Estimators of the survival, cumulative survival and mean residual life
functions.

Four methods are available:

``empirical``
    Ratio of empirical cumulative survival and survival functions.
``naive``
    Kernel smoothing directly on the data scale.
``transformed1`` / ``transformed2``
    Kernel smoothing on the scale ``y = g^{-1}(x)`` of a bijection
    ``g: R -> support``. Both share the survival estimate
    ``n^{-1} sum V((g^{-1}(t) - g^{-1}(X_i))/h)`` and differ in the
    cumulative survival estimate:

    * set 1: ``n^{-1} sum int_{g^{-1}(t)}^inf g'(z) V((z - Y_i)/h) dz``, whose
      derivative in ``t`` is exactly minus the survival estimate;
    * set 2: ``n^{-1} sum int_{-inf}^{Y_i} g'(z) V((g^{-1}(t) - z)/h) dz``,
      which tends to ``mean(X) - lower`` at the lower support end.

The integrals are evaluated by the backend in ``_backend`` as an analytic
plateau term plus composite Gauss-Legendre quadrature over the active kernel
window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _backend
from ._core_py import GL_NODES, GL_WEIGHTS
from .kernel import EPANECHNIKOV, Kernel, get_kernel
from .transform import SupportInterval, Transform

__all__ = [
    "DomainError",
    "METHODS",
    "OK",
    "TAIL_DEGENERATE",
    "INVALID",
    "Sample",
    "EstimatorSpec",
    "CurveEstimate",
    "PointEstimate",
    "BoundaryLimits",
    "empirical_mrl",
    "empirical_curves",
    "naive_kernel_curves",
    "transformed_curves",
    "t1_survival",
    "t1_cum_survival",
    "t2_survival",
    "t2_cum_survival",
    "transformed_mrl",
    "boundary_limits",
    "evaluate_curve",
]

METHODS = ("empirical", "naive", "transformed1", "transformed2")

OK = "ok"
TAIL_DEGENERATE = "tail-degenerate"
INVALID = "invalid"

# evaluation points must satisfy |g^{-1}(t)| <= this on the smoothing scale
MAX_ABS_Y = 30.0


class DomainError(ValueError):
    """Evaluation point outside the support."""


@dataclass(frozen=True, eq=False)
class Sample:
    """Observations strictly inside ``support``, stored sorted."""

    values: np.ndarray
    support: SupportInterval = field(default_factory=lambda: SupportInterval(0.0, math.inf))

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size == 0:
            raise ValueError("sample must contain at least one observation")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample contains non-finite values")
        if not np.all(self.support.contains(v)):
            raise DomainError(f"sample values must lie strictly inside {self.support}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class EstimatorSpec:
    """Configuration of one estimator.

    ``bandwidth`` is ignored by the empirical method. The transformed methods
    need a transform whose support equals the sample support; the identity
    transform is also accepted and reproduces the naive estimator.
    """

    method: str
    kernel: Kernel = EPANECHNIKOV
    transform: Transform | None = None
    bandwidth: float | None = None

    def __post_init__(self):
        method = self.method.lower()
        if method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "kernel", get_kernel(self.kernel))
        if method != "empirical":
            h = self.bandwidth
            if h is None or not (math.isfinite(h) and h > 0):
                raise ValueError(f"bandwidth must be a positive number, got {h!r}")
        if method.startswith("transformed") and self.transform is None:
            raise ValueError(f"{method} needs a transform")


@dataclass
class CurveEstimate:
    grid: np.ndarray
    survival: np.ndarray
    cum_survival: np.ndarray
    mrl: np.ndarray
    flags: np.ndarray
    method: str = ""
    bandwidth: float | None = None

    def __len__(self):
        return self.grid.size

    @property
    def degenerate(self) -> np.ndarray:
        return self.flags == TAIL_DEGENERATE


class PointEstimate(NamedTuple):
    survival: float
    cum_survival: float
    mrl: float
    flag: str


class BoundaryLimits(NamedTuple):
    """Limits at the lower support end (and survival at the upper end)."""

    survival: float
    cum_survival: float
    mrl: float
    survival_upper: float = 0.0


def _as_points(sample: Sample, t):
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    inside = sample.support.contains(arr)
    if not np.all(inside):
        bad = arr[~inside][0]
        raise DomainError(f"t={bad:g} is outside the support {sample.support}")
    return arr


def _ratio(num, den):
    """``num / den`` with the zero-denominator convention (value 0, flagged)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    dead = den <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(dead, 0.0, num / np.where(dead, 1.0, den))
    flags = np.where(dead, TAIL_DEGENERATE, OK).astype(object)
    return out, flags


def _scalar_or_array(t, arr):
    return float(arr[0]) if np.ndim(t) == 0 else arr


# ---------------------------------------------------------------------------
# empirical
# ---------------------------------------------------------------------------

def empirical_curves(sample: Sample, t):
    """Empirical ``(S_n, SS_n, m_n, flags)`` at the points ``t``."""
    t = _as_points(sample, t)
    x = sample.values
    n = sample.n
    k = np.searchsorted(x, t, side="right")
    count = n - k
    suffix = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
    excess = suffix[k] - count * t
    surv = count / n
    cum = excess / n
    with np.errstate(invalid="ignore", divide="ignore"):
        mrl = np.where(count > 0, excess / np.maximum(count, 1), 0.0)
    flags = np.where(count > 0, OK, TAIL_DEGENERATE).astype(object)
    return surv, cum, mrl, flags


def empirical_mrl(sample: Sample, t):
    """Average excess ``sum (X_i - t) 1{X_i > t} / sum 1{X_i > t}``.

    Returns 0 when no observation exceeds ``t``.
    """
    _, _, mrl, _ = empirical_curves(sample, t)
    return _scalar_or_array(t, mrl)


# ---------------------------------------------------------------------------
# naive kernel
# ---------------------------------------------------------------------------

def _naive_arrays(sample: Sample, kernel: Kernel, h: float, t):
    t = _as_points(sample, t)
    _check_h(h)
    u = (t[:, None] - sample.values[None, :]) / h
    surv = kernel.sf(u).mean(axis=1)
    cum = h * kernel.int_sf(u).mean(axis=1)
    mrl, flags = _ratio(cum, surv)
    return surv, cum, mrl, flags


def naive_kernel_curves(sample: Sample, kernel: Kernel | str, h: float, t):
    """Kernel estimates ``n^{-1} sum V((t - X_i)/h)`` and
    ``h n^{-1} sum VV((t - X_i)/h)`` together with their ratio.

    For a scalar ``t`` a :class:`PointEstimate` is returned, otherwise a tuple
    of arrays ``(survival, cum_survival, mrl, flags)``.
    """
    kernel = get_kernel(kernel)
    surv, cum, mrl, flags = _naive_arrays(sample, kernel, h, t)
    if np.ndim(t) == 0:
        return PointEstimate(float(surv[0]), float(cum[0]), float(mrl[0]), flags[0])
    return surv, cum, mrl, flags


# ---------------------------------------------------------------------------
# transformed kernel
# ---------------------------------------------------------------------------

def _check_h(h):
    if not (isinstance(h, (int, float, np.floating)) and math.isfinite(h) and h > 0):
        raise ValueError(f"bandwidth must be a positive number, got {h!r}")


def _check_transform(sample: Sample, transform: Transform):
    if transform.is_identity:
        return
    if transform.support != sample.support:
        raise ValueError(
            f"transform support {transform.support} does not match sample support {sample.support}"
        )


def transformed_curves(sample: Sample, transform: Transform, kernel: Kernel | str, h: float, t):
    """Survival and both cumulative survival estimates on the transformed scale.

    Returns
    -------
    survival, cum_survival_1, cum_survival_2 : 1D arrays
    """
    kernel = get_kernel(kernel)
    _check_h(h)
    _check_transform(sample, transform)
    t = _as_points(sample, t)
    x = transform.g_inv(t)
    if not np.all(np.abs(x) <= MAX_ABS_Y):
        bad = t[~(np.abs(x) <= MAX_ABS_Y)][0]
        raise DomainError(
            f"t={bad:.6g} is too close to the boundary; use boundary_limits for the limit"
        )
    y = transform.g_inv(sample.values)
    surv, cum1, cum2 = _backend.core.transformed_sums(
        x, y, float(h), kernel.code, transform.kind, transform.lower, transform.upper
    )
    for arr in (cum1, cum2):
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("non-finite cumulative survival estimate")
    return surv, cum1, cum2


def t1_survival(sample, transform, kernel, h, t):
    """First survival estimator, ``n^{-1} sum V((g^{-1}(t) - g^{-1}(X_i))/h)``."""
    surv, _, _ = transformed_curves(sample, transform, kernel, h, t)
    return _scalar_or_array(t, surv)


def t2_survival(sample, transform, kernel, h, t):
    """Second survival estimator; same value as :func:`t1_survival`."""
    surv, _, _ = transformed_curves(sample, transform, kernel, h, t)
    return _scalar_or_array(t, surv)


def t1_cum_survival(sample, transform, kernel, h, t):
    _, cum1, _ = transformed_curves(sample, transform, kernel, h, t)
    return _scalar_or_array(t, cum1)


def t2_cum_survival(sample, transform, kernel, h, t):
    _, _, cum2 = transformed_curves(sample, transform, kernel, h, t)
    return _scalar_or_array(t, cum2)


def transformed_mrl(sample, transform, kernel, h, t, variant: int = 2):
    """Mean residual life from the transformed estimators (``variant`` 1 or 2).

    Points beyond the reach of a compact kernel get the value 0.
    """
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    surv, cum1, cum2 = transformed_curves(sample, transform, kernel, h, t)
    mrl, _ = _ratio(cum1 if variant == 1 else cum2, surv)
    return _scalar_or_array(t, mrl)


def _smoothed_g_mean(y, transform: Transform, kernel: Kernel, h: float) -> float:
    """``n^{-1} sum int g(y_i + h u) K(u) du`` by composite Gauss-Legendre."""
    r, panels = kernel.window, kernel.panels
    edges = np.linspace(-r, r, panels + 1)
    total = np.zeros_like(y)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        u = 0.5 * (a + b) + half * GL_NODES
        vals = transform.g(y[:, None] + h * u[None, :]) * kernel.density(u)[None, :]
        total += half * (vals @ GL_WEIGHTS)
    return float(np.mean(total))


def boundary_limits(sample: Sample, transform: Transform, kernel: Kernel | str, h: float,
                    variant: int = 2) -> BoundaryLimits:
    """Analytic limits of the transformed estimators as ``t`` approaches the
    lower end of the support.

    Both survival estimators tend to 1. The second cumulative survival estimator
    tends to ``mean(X) - lower`` exactly; the first tends to
    ``n^{-1} sum int g(Y_i + h u) K(u) du - lower``, which differs from it by
    ``O(h^2)``.
    """
    kernel = get_kernel(kernel)
    _check_h(h)
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    if transform.is_identity or not math.isfinite(transform.lower):
        raise ValueError("boundary limits need a transform onto a support with a finite lower end")
    _check_transform(sample, transform)
    lower = transform.lower
    if variant == 2:
        cum = sample.mean - lower
    else:
        y = transform.g_inv(sample.values)
        cum = _smoothed_g_mean(y, transform, kernel, h) - lower
    return BoundaryLimits(1.0, cum, cum, 0.0)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def evaluate_curve(spec: EstimatorSpec, sample: Sample, grid) -> CurveEstimate:
    """Evaluate ``spec`` on ``grid``.

    Points where evaluation is impossible (outside the support, or too close
    to the boundary on the transformed scale) are flagged ``invalid`` with NaN
    values; the rest of the curve is still computed.
    """
    grid = np.asarray(grid, dtype=float).ravel()
    m = grid.size
    surv = np.full(m, np.nan)
    cum = np.full(m, np.nan)
    mrl = np.full(m, np.nan)
    flags = np.full(m, INVALID, dtype=object)

    ok = sample.support.contains(grid)
    if spec.method.startswith("transformed") and spec.transform is not None:
        with np.errstate(all="ignore"):
            x = spec.transform.g_inv(np.where(ok, grid, np.nan))
        ok &= np.abs(x) <= MAX_ABS_Y
    pts = grid[ok]
    h = spec.bandwidth
    if pts.size:
        if spec.method == "empirical":
            s, c, r, f = empirical_curves(sample, pts)
            h = None
        elif spec.method == "naive":
            s, c, r, f = _naive_arrays(sample, spec.kernel, h, pts)
        else:
            s, c1, c2 = transformed_curves(sample, spec.transform, spec.kernel, h, pts)
            c = c1 if spec.method == "transformed1" else c2
            r, f = _ratio(c, s)
        surv[ok], cum[ok], mrl[ok], flags[ok] = s, c, r, f
    return CurveEstimate(grid, surv, cum, mrl, flags, spec.method, h)
