"""Pure numpy implementation of the hot kernels.

Mirrors ``_core.pyx`` exactly; used when the compiled extension is not
available or when ``MRLSMOOTH_PURE_PYTHON`` is set.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

NAME = "python"

GL_ORDER = 32
GL_NODES, GL_WEIGHTS = leggauss(GL_ORDER)

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
_INV_SQRT_4PI = 1.0 / np.sqrt(4.0 * np.pi)
# pair arrays are processed in blocks of roughly this many elements
_BLOCK = 1 << 17


def _window(kcode):
    # (half-width in bandwidth units, number of GL panels across a full window)
    return (1.0, 2) if kcode == 0 else (8.0, 2)


def _g(tkind, lower, scale, z):
    if tkind == 1:
        return lower + np.exp(z)
    if tkind == 2:
        return lower + scale * special.ndtr(z)
    return z


def _gp(tkind, scale, z):
    if tkind == 1:
        return np.exp(z)
    if tkind == 2:
        return scale * _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return np.ones_like(z)


def _sf(kcode, u):
    if kcode == 0:
        uc = np.clip(u, -1.0, 1.0)
        return 0.5 - 0.75 * uc + 0.25 * uc**3
    return special.ndtr(-u)


def _quad(a, b, integrand, panels):
    """Composite Gauss-Legendre of ``integrand(z)`` over ``[a, b]`` (1-D arrays)."""
    width = (b - a) / panels
    total = np.zeros_like(a)
    for p in range(panels):
        left = a + p * width
        half = 0.5 * width
        z = (left + half)[:, None] + half[:, None] * GL_NODES[None, :]
        total += half * (integrand(z) @ GL_WEIGHTS)
    return total


def transformed_sums(x, y, h, kcode, tkind, lower, upper):
    """Average survival and cumulative survival terms on the smoothing scale.

    Parameters
    ----------
    x : 1D array
        Evaluation points ``g^{-1}(t)``.
    y : 1D array
        Transformed observations ``g^{-1}(X_i)``.
    h : float
        Bandwidth.
    kcode, tkind : int
        Kernel code (0 Epanechnikov, 1 Gaussian) and transform code
        (0 identity, 1 exp, 2 probit).
    lower, upper : float
        Support bounds used by the transform.

    Returns
    -------
    surv, cum1, cum2 : 1D arrays
        ``n^{-1} sum V((x - y_i)/h)``, ``n^{-1} sum VV_1(x, y_i)`` and
        ``n^{-1} sum VV_2(x, y_i)``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n, m = y.size, x.size
    scale = (upper - lower) if tkind == 2 else 1.0
    radius, panels = _window(kcode)
    rh = radius * h

    g = lambda z: _g(tkind, lower, scale, z)
    gp = lambda z: _gp(tkind, scale, z)

    # full-window integrals, one per observation (set 1) and per point (set 2)
    ya, yb = y - rh, y + rh
    full1 = _quad(ya, yb, lambda z: gp(z) * _sf(kcode, (z - y[:, None]) / h), panels) if n else np.zeros(0)
    xa, xb = x - rh, x + rh
    full2 = _quad(xa, xb, lambda z: gp(z) * _sf(kcode, (x[:, None] - z) / h), panels) if m else np.zeros(0)
    g_ya = g(ya)
    g_y = g(y)
    g_xb = g(xb)
    g_x = g(x)

    surv = np.zeros(m)
    cum1 = np.zeros(m)
    cum2 = np.zeros(m)
    step = max(1, _BLOCK // max(n, 1))
    for start in range(0, m, step):
        sl = slice(start, min(m, start + step))
        xs = x[sl][:, None]
        surv[sl] = _sf(kcode, (xs - y[None, :]) / h).sum(axis=1)

        # set 1: int_x^inf g'(z) V((z - y)/h) dz
        left1 = xs <= ya[None, :]
        c1 = np.where(left1, g_ya[None, :] - g_x[sl][:, None] + full1[None, :], 0.0)
        band1 = (~left1) & (xs < yb[None, :])
        if band1.any():
            r, c = np.nonzero(band1)
            xv, yv = x[sl][r], y[c]
            c1[r, c] = _quad(xv, yv + rh, lambda z: gp(z) * _sf(kcode, (z - yv[:, None]) / h), panels)
        cum1[sl] = c1.sum(axis=1)

        # set 2: int_{-inf}^y g'(z) V((x - z)/h) dz
        right2 = y[None, :] >= xb[sl][:, None]
        c2 = np.where(right2, g_y[None, :] - g_xb[sl][:, None] + full2[sl][:, None], 0.0)
        band2 = (~right2) & (y[None, :] > xa[sl][:, None])
        if band2.any():
            r, c = np.nonzero(band2)
            xv, yv = x[sl][r], y[c]
            c2[r, c] = _quad(xv - rh, yv, lambda z: gp(z) * _sf(kcode, (xv[:, None] - z) / h), panels)
        cum2[sl] = c2.sum(axis=1)

    if n:
        surv /= n
        cum1 /= n
        cum2 /= n
    return surv, cum1, cum2


def _kk(kcode, u):
    """Self-convolution of the kernel."""
    if kcode == 0:
        a = np.abs(u)
        return np.where(a < 2.0, 0.6 - 0.75 * a**2 + 0.375 * a**3 - 0.01875 * a**5, 0.0)
    return _INV_SQRT_4PI * np.exp(-0.25 * u * u)


def _k(kcode, u):
    if kcode == 0:
        return np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)
    return _INV_SQRT_2PI * np.exp(-0.5 * u * u)


def lscv_scores(y, hs, kcode):
    """Least-squares cross-validation score of a kernel density estimate of
    ``y`` for each bandwidth in ``hs``."""
    y = np.sort(np.asarray(y, dtype=float))
    hs = np.asarray(hs, dtype=float)
    n = y.size
    iu = np.triu_indices(n, k=1)
    d = np.sort((y[None, :] - y[:, None])[iu])
    kk0 = float(_kk(kcode, 0.0))
    cut = 2.0 if kcode == 0 else 40.0
    out = np.empty(hs.size)
    for k, h in enumerate(hs):
        u = d[: np.searchsorted(d, cut * h, side="right")] / h
        s_kk = _kk(kcode, u).sum()
        s_k = _k(kcode, u).sum()
        out[k] = (n * kk0 + 2.0 * s_kk) / (n * n * h) - 4.0 * s_k / (n * (n - 1) * h)
    return out
