"""Bijective maps from the real line onto a support interval.

Smoothing happens on the unbounded scale ``y = g^{-1}(x)``; these classes
provide ``g`` together with its first two derivatives and its inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

from .kernel import Kernel, get_kernel

__all__ = [
    "SupportInterval",
    "Transform",
    "CheckResult",
    "make_exp_transform",
    "make_probit_transform",
    "make_identity_transform",
    "transform_for_support",
    "validate_transform",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# integer codes shared with the compiled core
IDENTITY, EXP, PROBIT = 0, 1, 2
_KIND_NAMES = {IDENTITY: "identity", EXP: "log", PROBIT: "probit"}


@dataclass(frozen=True)
class SupportInterval:
    """Open interval ``(lower, upper)``; either end may be infinite."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"invalid support ({lo}, {hi})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, t):
        """Elementwise test for ``lower < t < upper``."""
        t = np.asarray(t, dtype=float)
        return (t > self.lower) & (t < self.upper)

    @classmethod
    def parse(cls, text: str) -> "SupportInterval":
        """Parse ``"a,b"`` where either end may be ``inf``/``-inf``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"support must look like 'a,b', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))

    def __str__(self) -> str:
        return f"({self.lower:g}, {self.upper:g})"


@dataclass(frozen=True)
class Transform:
    """Strictly increasing ``g: R -> support``.

    Only three families exist: identity (support R), shifted exponential
    ``g(y) = lower + e^y`` for half lines, and scaled probit
    ``g(y) = lower + (upper - lower) Phi(y)`` for bounded intervals.
    """

    kind: int
    support: SupportInterval

    @property
    def name(self) -> str:
        return _KIND_NAMES[self.kind]

    @property
    def is_identity(self) -> bool:
        return self.kind == IDENTITY

    @property
    def lower(self) -> float:
        return self.support.lower

    @property
    def upper(self) -> float:
        return self.support.upper

    @property
    def _scale(self) -> float:
        return self.support.width if self.kind == PROBIT else 1.0

    def g(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == EXP:
            return self.lower + np.exp(y)
        if self.kind == PROBIT:
            return self.lower + self._scale * special.ndtr(y)
        return y.copy()

    def g_inv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == EXP:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(t - self.lower)
        if self.kind == PROBIT:
            lo_frac = (t - self.lower) / self._scale
            hi_frac = (self.upper - t) / self._scale
            # invert through the smaller tail to keep relative accuracy
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(
                    lo_frac <= 0.5, special.ndtri(lo_frac), -special.ndtri(hi_frac)
                )
        return t.copy()

    def g_d1(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == EXP:
            return np.exp(y)
        if self.kind == PROBIT:
            return self._scale * _INV_SQRT_2PI * np.exp(-0.5 * y * y)
        return np.ones_like(y)

    def g_d2(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == EXP:
            return np.exp(y)
        if self.kind == PROBIT:
            return -y * self._scale * _INV_SQRT_2PI * np.exp(-0.5 * y * y)
        return np.zeros_like(y)


def make_exp_transform(lower: float = 0.0) -> Transform:
    """``g(y) = lower + exp(y)`` onto ``(lower, inf)``."""
    if not math.isfinite(lower):
        raise ValueError("lower bound must be finite")
    return Transform(EXP, SupportInterval(lower, math.inf))


def make_probit_transform(lower: float = 0.0, upper: float = 1.0) -> Transform:
    """``g(y) = lower + (upper - lower) * Phi(y)`` onto ``(lower, upper)``."""
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise ValueError("probit transform needs a bounded interval")
    return Transform(PROBIT, SupportInterval(lower, upper))


def make_identity_transform() -> Transform:
    return Transform(IDENTITY, SupportInterval(-math.inf, math.inf))


def transform_for_support(support: SupportInterval, name: str | None = None) -> Transform:
    """Build the transform named ``name`` (``log``/``probit``/``identity``) for
    ``support``; ``None`` picks probit for bounded and log for half lines."""
    if name is None:
        name = "probit" if support.bounded else "log"
    name = name.lower()
    if name == "identity":
        return make_identity_transform()
    if name in ("log", "exp"):
        if not math.isfinite(support.lower) or math.isfinite(support.upper):
            raise ValueError(f"log transform needs a support (a, inf), got {support}")
        return make_exp_transform(support.lower)
    if name == "probit":
        if not support.bounded:
            raise ValueError(f"probit transform needs a bounded support, got {support}")
        return make_probit_transform(support.lower, support.upper)
    raise ValueError(f"unknown transform {name!r}")


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


def validate_transform(tr: Transform, kernel: Kernel | str) -> list[CheckResult]:
    """Numerically check the regularity conditions a transform must satisfy.

    Never raises; each failed check is reported by name.
    """
    kernel = get_kernel(kernel)
    results: list[CheckResult] = []

    def record(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))

    ys = np.linspace(-10.0, 10.0, 2001)

    def monotone():
        d1 = tr.g_d1(ys)
        gv = tr.g(ys)
        ok = np.all(d1 > 0) and np.all(np.diff(gv) >= 0)
        return ok, f"min g'={d1.min():.3g}"

    def round_trip():
        lo = tr.lower if math.isfinite(tr.lower) else -50.0
        hi = tr.upper if math.isfinite(tr.upper) else lo + 100.0
        t = np.linspace(lo, hi, 203)[1:-1]
        err = np.abs(tr.g(tr.g_inv(t)) - t) / np.maximum(1.0, np.abs(t))
        return err.max() <= 1e-12, f"max rel err={err.max():.3g}"

    def limits():
        lo, hi = float(tr.g(-30.0)), float(tr.g(30.0))
        tol = 1e-9
        ok_lo = abs(lo - tr.lower) <= tol * max(1.0, abs(tr.lower)) if math.isfinite(tr.lower) else lo < -29
        ok_hi = abs(hi - tr.upper) <= tol * max(1.0, abs(tr.upper)) if math.isfinite(tr.upper) else hi > 1e6
        return ok_lo and ok_hi, f"g(-30)={lo:.6g}, g(30)={hi:.6g}"

    def derivatives():
        y = np.linspace(-5.0, 5.0, 101)
        eps = 1e-5
        fd1 = (tr.g(y + eps) - tr.g(y - eps)) / (2 * eps)
        fd2 = (tr.g_d1(y + eps) - tr.g_d1(y - eps)) / (2 * eps)
        d1, d2 = tr.g_d1(y), tr.g_d2(y)
        floor1 = 1e-6 * np.abs(fd1).max()
        floor2 = 1e-6 * max(np.abs(fd2).max(), np.abs(fd1).max())
        e1 = np.abs(d1 - fd1) / np.maximum(np.abs(fd1), floor1)
        e2 = np.abs(d2 - fd2) / np.maximum(np.abs(fd2), floor2)
        worst = max(e1.max(), e2.max())
        return worst <= 1e-5, f"max rel err g'={e1.max():.3g}, g''={e2.max():.3g}"

    def integrability():
        lo, hi = (-kernel.radius, kernel.radius) if kernel.compact else (-np.inf, np.inf)
        vals = []
        for u in (-0.1, 0.0, 0.1):
            v, _ = integrate.quad(
                lambda z: float(tr.g_d1(u * z)) * float(kernel.density(z)), lo, hi
            )
            vals.append(v)
        ok = all(math.isfinite(v) for v in vals)
        return ok, "int g'(uy)K(y)dy = " + ", ".join(f"{v:.4g}" for v in vals)

    record("monotone", monotone)
    record("round_trip", round_trip)
    record("limits", limits)
    record("derivatives", derivatives)
    record("integrability", integrability)
    return results
