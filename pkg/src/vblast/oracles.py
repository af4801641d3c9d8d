"""Brute-force reference integrals.

These evaluate the *defining* nested integrals directly with tensor
Gauss-Legendre rules and never touch the closed forms in
:mod:`vblast.combinatorics`, so they can serve as independent checks.
"""

import math

import numpy as np

from .quadrature import _legendre01

__all__ = [
    "nested_integral",
    "wilks_g_quadrature",
    "integral_Ij_quadrature",
    "integral_J_quadrature",
    "cone_mass",
]


def _nested_rule(limits, n, panels=1):
    """Points/weights for variables bounded outermost-first by ``limits``.

    ``limits[d](pts) -> (lo, hi)`` sees the already-placed outer variables as
    an array of shape (N, d).  ``panels`` splits the outermost axis only.
    """
    u1, w1 = _legendre01(n)
    pts = np.empty((1, 0))
    wts = np.ones(1)
    for d, lim in enumerate(limits):
        u, w = u1, w1
        if d == 0 and panels > 1:
            u = ((np.arange(panels)[:, None] + u1[None, :]) / panels).ravel()
            w = np.tile(w1, panels) / panels
        lo, hi = lim(pts)
        lo = np.broadcast_to(np.asarray(lo, dtype=float), wts.shape)
        hi = np.broadcast_to(np.asarray(hi, dtype=float), wts.shape)
        size = wts.size
        span = np.repeat(hi - lo, u.size)
        new = np.repeat(lo, u.size) + span * np.tile(u, size)
        wts = np.repeat(wts, u.size) * np.tile(w, size) * span
        pts = np.concatenate([np.repeat(pts, u.size, axis=0), new[:, None]], axis=1)
    return pts, wts


def nested_integral(func, limits, n=(20, 30), panels=1):
    """Integrate with two rule sizes; return ``(value, |difference|)``."""
    vals = []
    for k in n:
        pts, wts = _nested_rule(limits, k, panels)
        vals.append(float(wts @ func(pts)))
    return vals[-1], abs(vals[-1] - vals[-2])


def wilks_g_quadrature(alpha, n=(8, 12)):
    """Volume of ``{0 <= x_{k+1} <= a_1, x_{k+1} <= x_k <= a_2, ...,
    x_2 <= x_1 <= a_{k+1}}``."""
    a = [float(v) for v in alpha]
    limits = [lambda p: (0.0, a[0])]
    for idx in range(1, len(a)):
        limits.append(lambda p, idx=idx: (p[:, -1], a[idx]))
    return nested_integral(lambda p: np.ones(len(p)), limits, n)


def integral_Ij_quadrature(gamma, n=(20, 30)):
    """The defining (j-1)-fold integral of ``exp(-v_1)``."""
    g = [float(v) for v in gamma]
    j = len(g)
    if j == 1:
        return math.exp(-g[0]), 0.0
    # outermost v_{j-1} in [g_j, g_{j-1}], then v_{q} in [v_{q+1}, g_q]
    limits = [lambda p: (g[j - 1], g[j - 2])]
    for q in range(j - 2, 0, -1):
        limits.append(lambda p, q=q: (p[:, -1], g[q - 1]))
    return nested_integral(lambda p: np.exp(-p[:, -1]), limits, n)


def integral_J_quadrature(gamma, r, n=(20, 30)):
    """The defining m-fold integral behind ``integral_J``."""
    g = [float(v) for v in gamma]
    m = len(g)
    fm = math.factorial(r - m)
    limits = [lambda p: (0.0, g[m - 1])]
    for q in range(m - 1, 0, -1):
        limits.append(lambda p, q=q: (p[:, -1], g[q - 1]))
    return nested_integral(lambda p: p[:, 0] ** (r - m) / fm * np.exp(-p[:, -1]), limits, n)


def cone_mass(density, dim, upper=60.0, n=(16, 24), panels=12):
    """Integral of ``density(points)`` over ``upper >= g_1 >= ... >= g_dim >= 0``."""
    limits = [lambda p: (0.0, upper)]
    for _ in range(1, dim):
        limits.append(lambda p: (0.0, p[:, -1]))
    return nested_integral(density, limits, n, panels)
