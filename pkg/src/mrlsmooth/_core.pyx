# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contract as ``_core_py``."""

import numpy as np
from numpy.polynomial.legendre import leggauss

from libc.math cimport exp, erfc, fabs

NAME = "cython"

_ORDER = 32
cdef int GL_ORDER = _ORDER
_nodes, _weights = leggauss(_ORDER)
cdef double[::1] GL_NODES = np.ascontiguousarray(_nodes)
cdef double[::1] GL_WEIGHTS = np.ascontiguousarray(_weights)

cdef double INV_SQRT_2PI = 0.3989422804014327
cdef double INV_SQRT_4PI = 0.28209479177387814
cdef double SQRT1_2 = 0.7071067811865476


cdef inline double _ndtr(double z) nogil:
    return 0.5 * erfc(-z * SQRT1_2)


cdef inline double _g(int tkind, double lower, double scale, double z) nogil:
    if tkind == 1:
        return lower + exp(z)
    if tkind == 2:
        return lower + scale * _ndtr(z)
    return z


cdef inline double _gp(int tkind, double scale, double z) nogil:
    if tkind == 1:
        return exp(z)
    if tkind == 2:
        return scale * INV_SQRT_2PI * exp(-0.5 * z * z)
    return 1.0


cdef inline double _sf(int kcode, double u) nogil:
    if kcode == 0:
        if u <= -1.0:
            return 1.0
        if u >= 1.0:
            return 0.0
        return 0.5 - 0.75 * u + 0.25 * u * u * u
    return 0.5 * erfc(u * SQRT1_2)


cdef double _quad1(double a, double b, double c, double h, int kcode, int tkind,
                   double scale, int panels) nogil:
    # int_a^b g'(z) V((z - c)/h) dz
    cdef double width = (b - a) / panels, half = 0.5 * width, mid, z, acc = 0.0
    cdef int p, k
    for p in range(panels):
        mid = a + p * width + half
        for k in range(GL_ORDER):
            z = mid + half * GL_NODES[k]
            acc += half * GL_WEIGHTS[k] * _gp(tkind, scale, z) * _sf(kcode, (z - c) / h)
    return acc


cdef double _quad2(double a, double b, double c, double h, int kcode, int tkind,
                   double scale, int panels) nogil:
    # int_a^b g'(z) V((c - z)/h) dz
    cdef double width = (b - a) / panels, half = 0.5 * width, mid, z, acc = 0.0
    cdef int p, k
    for p in range(panels):
        mid = a + p * width + half
        for k in range(GL_ORDER):
            z = mid + half * GL_NODES[k]
            acc += half * GL_WEIGHTS[k] * _gp(tkind, scale, z) * _sf(kcode, (c - z) / h)
    return acc


def transformed_sums(x, y, double h, int kcode, int tkind, double lower, double upper):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=float)
    cdef Py_ssize_t m = xv.shape[0], n = yv.shape[0], i, j
    cdef double scale = (upper - lower) if tkind == 2 else 1.0
    cdef double radius = 1.0 if kcode == 0 else 8.0
    cdef int panels = 2
    cdef double rh = radius * h
    surv_a = np.zeros(m)
    cum1_a = np.zeros(m)
    cum2_a = np.zeros(m)
    full1_a = np.empty(n)
    g_ya_a = np.empty(n)
    g_y_a = np.empty(n)
    cdef double[::1] surv = surv_a, cum1 = cum1_a, cum2 = cum2_a
    cdef double[::1] full1 = full1_a, g_ya = g_ya_a, g_y = g_y_a
    cdef double xi, yj, s, c1, c2, gx, gxb, full2

    with nogil:
        for j in range(n):
            yj = yv[j]
            full1[j] = _quad1(yj - rh, yj + rh, yj, h, kcode, tkind, scale, panels)
            g_ya[j] = _g(tkind, lower, scale, yj - rh)
            g_y[j] = _g(tkind, lower, scale, yj)
        for i in range(m):
            xi = xv[i]
            gx = _g(tkind, lower, scale, xi)
            gxb = _g(tkind, lower, scale, xi + rh)
            full2 = _quad2(xi - rh, xi + rh, xi, h, kcode, tkind, scale, panels)
            s = 0.0
            c1 = 0.0
            c2 = 0.0
            for j in range(n):
                yj = yv[j]
                s += _sf(kcode, (xi - yj) / h)
                if xi <= yj - rh:
                    c1 += g_ya[j] - gx + full1[j]
                elif xi < yj + rh:
                    c1 += _quad1(xi, yj + rh, yj, h, kcode, tkind, scale, panels)
                if yj >= xi + rh:
                    c2 += g_y[j] - gxb + full2
                elif yj > xi - rh:
                    c2 += _quad2(xi - rh, yj, xi, h, kcode, tkind, scale, panels)
            if n > 0:
                surv[i] = s / n
                cum1[i] = c1 / n
                cum2[i] = c2 / n
    return surv_a, cum1_a, cum2_a


cdef inline double _kk(int kcode, double u) nogil:
    cdef double a = fabs(u)
    if kcode == 0:
        if a >= 2.0:
            return 0.0
        return 0.6 - 0.75 * a * a + 0.375 * a * a * a - 0.01875 * a * a * a * a * a
    return INV_SQRT_4PI * exp(-0.25 * u * u)


cdef inline double _k(int kcode, double u) nogil:
    if kcode == 0:
        if fabs(u) >= 1.0:
            return 0.0
        return 0.75 * (1.0 - u * u)
    return INV_SQRT_2PI * exp(-0.5 * u * u)


def lscv_scores(y, hs, int kcode):
    cdef double[::1] yv = np.sort(np.asarray(y, dtype=float))
    cdef double[::1] hv = np.ascontiguousarray(hs, dtype=float)
    cdef Py_ssize_t n = yv.shape[0], nh = hv.shape[0], i, j, k
    out_a = np.empty(nh)
    cdef double[::1] out = out_a
    cdef double h, cut, d, s_kk, s_k, u, e
    cdef double kk0 = _kk(kcode, 0.0)
    # Gaussian terms beyond 12h are below 1e-15 of the diagonal
    cdef double cutmul = 2.0 if kcode == 0 else 12.0
    with nogil:
        for k in range(nh):
            h = hv[k]
            cut = cutmul * h
            s_kk = 0.0
            s_k = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    d = yv[j] - yv[i]
                    if d > cut:
                        break
                    u = d / h
                    if kcode == 0:
                        s_kk += _kk(kcode, u)
                        s_k += _k(kcode, u)
                    else:
                        e = exp(-0.25 * u * u)
                        s_kk += INV_SQRT_4PI * e
                        s_k += INV_SQRT_2PI * e * e
            out[k] = (n * kk0 + 2.0 * s_kk) / (n * n * h) - 4.0 * s_k / (n * (n - 1.0) * h)
    return out_a
