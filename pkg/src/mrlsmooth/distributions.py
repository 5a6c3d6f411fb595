"""Reference lifetime distributions with closed-form survival quantities.

Each distribution exposes the density and its derivative, the survival
function ``S``, the cumulative survival ``SS(t) = int_t^inf S``, its integral
``SSbar(t) = int_t^inf SS`` and the mean residual life ``m = SS / S``.
The latter three follow from partial moments ``E[X^k 1{X > t}]``:

    SS(t)    = E[X 1{X>t}] - t S(t)
    SSbar(t) = (E[X^2 1{X>t}] - 2t E[X 1{X>t}] + t^2 S(t)) / 2
"""

from __future__ import annotations

import math
import re

import numpy as np
from scipy import special

from .transform import SupportInterval

__all__ = [
    "TrueDistribution",
    "Uniform",
    "Beta",
    "Gamma",
    "Weibull",
    "AbsNormal",
    "Exponential",
    "parse_distribution",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class TrueDistribution:
    """Base class; subclasses implement ``pdf``, ``dpdf``, ``sf`` and
    ``partial_moment``."""

    name = "distribution"
    support = SupportInterval(0.0, math.inf)

    def params(self) -> tuple:
        return ()

    def __repr__(self):
        args = ",".join(f"{p:g}" for p in self.params())
        return f"{self.name}({args})"

    def __eq__(self, other):
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self):
        return hash((type(self).__name__, self.params()))

    # -- to be provided by subclasses ------------------------------------
    def pdf(self, t):
        raise NotImplementedError

    def dpdf(self, t):
        raise NotImplementedError

    def sf(self, t):
        raise NotImplementedError

    def partial_moment(self, k: int, t):
        """``E[X^k 1{X > t}]`` for ``k`` in 0, 1, 2."""
        raise NotImplementedError

    def rvs(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    # -- derived quantities ----------------------------------------------
    def cdf(self, t):
        return 1.0 - self.sf(t)

    def _clip(self, t):
        t = np.asarray(t, dtype=float)
        lo = self.support.lower if math.isfinite(self.support.lower) else -np.inf
        return np.clip(t, lo, self.support.upper)

    def cum_sf(self, t):
        t = self._clip(t)
        return np.maximum(self.partial_moment(1, t) - t * self.partial_moment(0, t), 0.0)

    def int_cum_sf(self, t):
        t = self._clip(t)
        m0, m1, m2 = (self.partial_moment(k, t) for k in (0, 1, 2))
        return np.maximum(0.5 * (m2 - 2.0 * t * m1 + t * t * m0), 0.0)

    def mrl(self, t):
        s = self.sf(self._clip(t))
        c = self.cum_sf(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 0, c / np.where(s > 0, s, 1.0), 0.0)

    @property
    def mean(self) -> float:
        return float(self.partial_moment(1, self.support.lower if math.isfinite(self.support.lower) else -np.inf))

    @property
    def var(self) -> float:
        lo = self.support.lower
        return float(self.partial_moment(2, lo)) - self.mean**2

    @property
    def std(self) -> float:
        return math.sqrt(self.var)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` values strictly inside the support."""
        out = self.rvs(rng, n)
        bad = ~self.support.contains(out)
        while bad.any():
            out[bad] = self.rvs(rng, int(bad.sum()))
            bad = ~self.support.contains(out)
        return out


class Uniform(TrueDistribution):
    name = "uniform"

    def __init__(self, a: float = 0.0, b: float = 1.0):
        if not a < b:
            raise ValueError("uniform needs a < b")
        self.a, self.b = float(a), float(b)
        self.support = SupportInterval(self.a, self.b)

    def params(self):
        return (self.a, self.b)

    def _inside(self, t):
        t = np.asarray(t, dtype=float)
        return (t > self.a) & (t < self.b)

    def pdf(self, t):
        return np.where(self._inside(t), 1.0 / (self.b - self.a), 0.0)

    def dpdf(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def sf(self, t):
        return np.clip((self.b - np.asarray(t, dtype=float)) / (self.b - self.a), 0.0, 1.0)

    def partial_moment(self, k, t):
        t = np.clip(np.asarray(t, dtype=float), self.a, self.b)
        return (self.b ** (k + 1) - t ** (k + 1)) / ((k + 1) * (self.b - self.a))

    def cum_sf(self, t):
        t = np.clip(np.asarray(t, dtype=float), self.a, self.b)
        return (self.b - t) ** 2 / (2.0 * (self.b - self.a))

    def int_cum_sf(self, t):
        t = np.clip(np.asarray(t, dtype=float), self.a, self.b)
        return (self.b - t) ** 3 / (6.0 * (self.b - self.a))

    def rvs(self, rng, size):
        return rng.uniform(self.a, self.b, size)


class Beta(TrueDistribution):
    name = "beta"
    support = SupportInterval(0.0, 1.0)

    def __init__(self, alpha: float, beta: float):
        if not (alpha > 0 and beta > 0):
            raise ValueError("beta parameters must be positive")
        self.alpha, self.beta = float(alpha), float(beta)

    def params(self):
        return (self.alpha, self.beta)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        tc = np.where(inside, t, 0.5)
        logf = (self.alpha - 1) * np.log(tc) + (self.beta - 1) * np.log1p(-tc) - special.betaln(self.alpha, self.beta)
        return np.where(inside, np.exp(logf), 0.0)

    def dpdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        tc = np.where(inside, t, 0.5)
        # f' = f * d/dt log f
        dlog = (self.alpha - 1) / tc - (self.beta - 1) / (1 - tc)
        return np.where(inside, self.pdf(tc) * dlog, 0.0)

    def sf(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return special.betaincc(self.alpha, self.beta, t)

    def partial_moment(self, k, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        coef = 1.0
        for r in range(k):
            coef *= (self.alpha + r) / (self.alpha + self.beta + r)
        return coef * special.betaincc(self.alpha + k, self.beta, t)

    def rvs(self, rng, size):
        return rng.beta(self.alpha, self.beta, size)


class Gamma(TrueDistribution):
    """Gamma with shape ``k`` and scale ``theta`` (mean ``k theta``)."""

    name = "gamma"

    def __init__(self, shape: float, scale: float):
        if not (shape > 0 and scale > 0):
            raise ValueError("gamma parameters must be positive")
        self.shape, self.scale = float(shape), float(scale)

    def params(self):
        return (self.shape, self.scale)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        tc = np.where(pos, t, 1.0)
        logf = (self.shape - 1) * np.log(tc) - tc / self.scale - special.gammaln(self.shape) - self.shape * math.log(self.scale)
        return np.where(pos, np.exp(logf), 0.0)

    def dpdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        tc = np.where(pos, t, 1.0)
        return np.where(pos, self.pdf(tc) * ((self.shape - 1) / tc - 1.0 / self.scale), 0.0)

    def sf(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return special.gammaincc(self.shape, t / self.scale)

    def partial_moment(self, k, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        coef = self.scale**k * math.exp(special.gammaln(self.shape + k) - special.gammaln(self.shape))
        return coef * special.gammaincc(self.shape + k, t / self.scale)

    def rvs(self, rng, size):
        return rng.gamma(self.shape, self.scale, size)


class Exponential(Gamma):
    """Exponential with rate ``rate`` (mean ``1/rate``)."""

    name = "exponential"

    def __init__(self, rate: float = 1.0):
        if not rate > 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)
        super().__init__(1.0, 1.0 / self.rate)

    def params(self):
        return (self.rate,)

    def sf(self, t):
        return np.exp(-self.rate * np.maximum(np.asarray(t, dtype=float), 0.0))

    def cum_sf(self, t):
        return self.sf(t) / self.rate

    def int_cum_sf(self, t):
        return self.sf(t) / self.rate**2

    def mrl(self, t):
        return np.full_like(np.asarray(t, dtype=float), 1.0 / self.rate)

    def rvs(self, rng, size):
        return rng.exponential(1.0 / self.rate, size)


class Weibull(TrueDistribution):
    """Weibull with shape ``k`` and scale ``lam``."""

    name = "weibull"

    def __init__(self, shape: float, scale: float):
        if not (shape > 0 and scale > 0):
            raise ValueError("weibull parameters must be positive")
        self.shape, self.scale = float(shape), float(scale)

    def params(self):
        return (self.shape, self.scale)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        z = np.where(pos, t, 1.0) / self.scale
        k = self.shape
        return np.where(pos, (k / self.scale) * z ** (k - 1) * np.exp(-(z**k)), 0.0)

    def dpdf(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        tc = np.where(pos, t, 1.0)
        k = self.shape
        dlog = (k - 1) / tc - k * tc ** (k - 1) / self.scale**k
        return np.where(pos, self.pdf(tc) * dlog, 0.0)

    def sf(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return np.exp(-((t / self.scale) ** self.shape))

    def partial_moment(self, k, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        a = 1.0 + k / self.shape
        return self.scale**k * special.gamma(a) * special.gammaincc(a, (t / self.scale) ** self.shape)

    def rvs(self, rng, size):
        return self.scale * rng.weibull(self.shape, size)


class AbsNormal(TrueDistribution):
    """``|Z|`` for ``Z ~ N(0, sigma^2)``."""

    name = "absnormal"

    def __init__(self, sigma: float = 1.0):
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)

    def params(self):
        return (self.sigma,)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        z = t / self.sigma
        return np.where(t > 0, 2.0 * _INV_SQRT_2PI * np.exp(-0.5 * z * z) / self.sigma, 0.0)

    def dpdf(self, t):
        t = np.asarray(t, dtype=float)
        return -t / self.sigma**2 * self.pdf(t)

    def sf(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return 2.0 * special.ndtr(-t / self.sigma)

    def partial_moment(self, k, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        s = self.sigma
        z = t / s
        phi = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
        tail = special.ndtr(-z)
        if k == 0:
            return 2.0 * tail
        if k == 1:
            return 2.0 * s * phi
        return 2.0 * s * s * (z * phi + tail)

    def cum_sf(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        z = t / self.sigma
        return 2.0 * self.sigma * (_INV_SQRT_2PI * np.exp(-0.5 * z * z) - z * special.ndtr(-z))

    def rvs(self, rng, size):
        return np.abs(rng.normal(0.0, self.sigma, size))


_FAMILIES = {
    "uniform": Uniform,
    "beta": Beta,
    "gamma": Gamma,
    "weibull": Weibull,
    "absnormal": AbsNormal,
    "abs.normal": AbsNormal,
    "exponential": Exponential,
    "exp": Exponential,
}


def parse_distribution(text: str) -> TrueDistribution:
    """Parse ``"gamma(2,3)"``, ``"absnormal"``, ``"exponential(0.5)"`` etc."""
    m = re.fullmatch(r"\s*([A-Za-z.]+)\s*(?:\(([^)]*)\))?\s*", text)
    if not m:
        raise ValueError(f"cannot parse distribution {text!r}")
    family = m.group(1).lower()
    if family not in _FAMILIES:
        raise ValueError(f"unknown distribution {family!r}; choose from {sorted(set(_FAMILIES))}")
    args = [float(a) for a in m.group(2).split(",")] if m.group(2) and m.group(2).strip() else []
    try:
        return _FAMILIES[family](*args)
    except TypeError:
        raise ValueError(f"wrong number of parameters for {family}: {args}") from None
