"""Leading-order bias, variance and covariance of the transformed estimators.

For a known distribution and transform these serve as oracles for
Monte-Carlo checks. With ``y = g^{-1}(t)``:

    b1 = g''(y) f(t) + g'(y)^2 f'(t)
    b2 = g'(y)^2 f(t) + int_y^inf g''(x) g'(x) f(g(x)) dx   (= -int_t^sup b1)
    b3 = g'(y)^2 f(t) - g''(y) S(t)
    b4 = 2 SSbar(t) - S(t) m(t)^2
    b5 = g'(y) f(t) m(t)^2
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .distributions import TrueDistribution
from .kernel import Kernel, get_kernel
from .transform import Transform

__all__ = ["BTerms", "Moments", "ESTIMATOR_KINDS", "eval_b", "b2_from_b1", "theoretical_bias_variance"]

ESTIMATOR_KINDS = (
    "survival1",
    "survival2",
    "cum_survival1",
    "cum_survival2",
    "mrl1",
    "mrl2",
)


class BTerms(NamedTuple):
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float


class Moments(NamedTuple):
    bias: float
    variance: float
    covariance: float


def _check_interior(dist: TrueDistribution, t: float):
    if not dist.support.contains(t):
        raise ValueError(f"t={t:g} is not inside the support {dist.support}")


def _quad_to_upper(fn, t, upper):
    val, _ = integrate.quad(fn, t, upper, epsabs=1e-12, epsrel=1e-11, limit=400)
    if not math.isfinite(val):
        raise FloatingPointError("tail integral is not finite")
    return val


def _b1_at(dist, tr, t):
    y = float(tr.g_inv(t))
    g1, g2 = float(tr.g_d1(y)), float(tr.g_d2(y))
    return g2 * float(dist.pdf(t)) + g1 * g1 * float(dist.dpdf(t))


def eval_b(dist: TrueDistribution, tr: Transform, t: float) -> BTerms:
    """Evaluate ``b1 .. b5`` at an interior point ``t``."""
    _check_interior(dist, t)
    y = float(tr.g_inv(t))
    g1, g2 = float(tr.g_d1(y)), float(tr.g_d2(y))
    f, df = float(dist.pdf(t)), float(dist.dpdf(t))
    s = float(dist.sf(t))
    m = float(dist.mrl(t))

    b1 = g2 * f + g1 * g1 * df

    # int_y^inf g''(x) g'(x) f(g(x)) dx after substituting u = g(x)
    def integrand(u):
        return float(tr.g_d2(tr.g_inv(u)) * dist.pdf(u))

    tail = _quad_to_upper(integrand, t, dist.support.upper)
    b2 = g1 * g1 * f + tail
    b3 = g1 * g1 * f - g2 * s
    b4 = 2.0 * float(dist.int_cum_sf(t)) - s * m * m
    b5 = g1 * f * m * m
    return BTerms(b1, b2, b3, b4, b5)


def b2_from_b1(dist: TrueDistribution, tr: Transform, t: float) -> float:
    """Independent route to ``b2`` as ``-int_t^sup b1(z) dz``."""
    _check_interior(dist, t)
    val = _quad_to_upper(lambda z: _b1_at(dist, tr, z), t, dist.support.upper)
    return -val


def theoretical_bias_variance(
    dist: TrueDistribution,
    tr: Transform,
    kernel: Kernel | str,
    h: float,
    n: int,
    t: float,
    kind: str = "mrl2",
) -> Moments:
    """Leading-order bias and variance of one estimator, together with
    ``Cov[SS~, S~] = n^{-1} SS(t) F(t)``.

    ``kind`` is one of :data:`ESTIMATOR_KINDS`.
    """
    if kind not in ESTIMATOR_KINDS:
        raise ValueError(f"unknown estimator kind {kind!r}; choose from {ESTIMATOR_KINDS}")
    if n < 1:
        raise ValueError("n must be at least 1")
    kernel = get_kernel(kernel)
    mu2, rho = kernel.mu2, kernel.rho
    b = eval_b(dist, tr, t)
    y = float(tr.g_inv(t))
    g1 = float(tr.g_d1(y))
    f = float(dist.pdf(t))
    s = float(dist.sf(t))
    cs = float(dist.cum_sf(t))
    m = float(dist.mrl(t))
    cov = cs * (1.0 - s) / n

    if kind.startswith("survival"):
        bias = -0.5 * h * h * b.b1 * mu2
        var = s * (1.0 - s) / n - h / n * g1 * f * rho
    elif kind.startswith("cum_survival"):
        bterm = b.b2 if kind.endswith("1") else b.b3
        bias = 0.5 * h * h * bterm * mu2
        var = (2.0 * float(dist.int_cum_sf(t)) - cs * cs) / n
    else:
        bterm = b.b2 if kind.endswith("1") else b.b3
        bias = 0.5 * h * h / s * (bterm + m * b.b1) * mu2
        var = b.b4 / (n * s * s) - h / n * b.b5 / (s * s) * rho
    return Moments(bias, var, cov)
