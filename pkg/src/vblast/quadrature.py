"""Tensor-product quadrature over the ordered cone ``g_1 >= g_2 >= ... >= 0``.

One coordinate (the *pivot*) ranges over an explicit interval or is held
fixed.  Coordinates before it run upward from the next one to infinity
(shifted Gauss-Laguerre), coordinates after it run downward from the previous
one to zero (scaled Gauss-Legendre).  With this ordering every sub-integrand
is smooth, so plain Gauss rules converge geometrically; the node count is
grown until two successive estimates agree.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericError, ParameterError

log = logging.getLogger(__name__)

__all__ = ["QuadratureSettings", "cone_rule", "integrate_cone"]


@dataclass(frozen=True)
class QuadratureSettings:
    """Accuracy knobs for the distribution engine.

    Attributes
    ----------
    nodes : int
        Starting number of nodes per axis.
    max_nodes : int
        Refinement stops (with :class:`NumericError`) beyond this.
    gamma_max : float or None
        Initial upper bracket for inverse-CDF searches and default histogram
        range; ``None`` means ``8 + 3 r``.
    rel_tol : float
        Relative agreement required between successive refinements.
    """

    nodes: int = 16
    max_nodes: int = 96
    gamma_max: float | None = None
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.nodes < 8:
            raise ParameterError(f"nodes must be >= 8, got {self.nodes}")
        if self.max_nodes < self.nodes:
            raise ParameterError("max_nodes must be >= nodes")
        if not (0 < self.rel_tol <= 1e-2):
            raise ParameterError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if self.gamma_max is not None and not self.gamma_max > 0:
            raise ParameterError("gamma_max must be positive")

    def upper(self, r):
        return self.gamma_max if self.gamma_max is not None else 8.0 + 3.0 * r


@lru_cache(maxsize=None)
def _legendre01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _laguerre(n):
    # weights premultiplied by e^x so that sum w f(x) ~ int_0^inf f
    x, w = np.polynomial.laguerre.laggauss(n)
    return x, w * np.exp(x)


def cone_rule(dim, pivot, lo, hi, n):
    """Nodes and weights on ``{g_1 >= ... >= g_dim >= 0, lo <= g_pivot <= hi}``.

    ``pivot`` is 1-based.  ``hi`` may be ``inf``; ``lo == hi`` pins the pivot
    (weight one), which turns the rule into a rule for a slice.

    Returns
    -------
    points : ndarray, shape (N, dim)
    weights : ndarray, shape (N,)
    """
    if not 1 <= pivot <= dim:
        raise ParameterError(f"pivot {pivot} outside 1..{dim}")
    if hi == lo:
        base, w = np.array([float(lo)]), np.array([1.0])
    elif math.isinf(hi):
        x, wl = _laguerre(n)
        base, w = lo + x, wl.copy()
    else:
        x, wg = _legendre01(n)
        base, w = lo + (hi - lo) * x, (hi - lo) * wg

    cols = {pivot: base}
    # upward chain: g_i = g_{i+1} + s,  s in [0, inf)
    if pivot > 1:
        x, wl = _laguerre(n)
        for i in range(pivot - 1, 0, -1):
            size = w.size
            cols = {k: np.repeat(v, n) for k, v in cols.items()}
            cols[i] = cols[i + 1] + np.tile(x, size)
            w = np.repeat(w, n) * np.tile(wl, size)
    # downward chain: g_i = g_{i-1} u,  u in [0, 1]
    if pivot < dim:
        u, wg = _legendre01(n)
        for i in range(pivot + 1, dim + 1):
            size = w.size
            cols = {k: np.repeat(v, n) for k, v in cols.items()}
            prev = cols[i - 1]
            cols[i] = prev * np.tile(u, size)
            w = np.repeat(w, n) * np.tile(wg, size) * prev
    pts = np.stack([cols[i] for i in range(1, dim + 1)], axis=-1)
    return pts, w


def _node_schedule(start, stop):
    n = start
    while n <= stop:
        yield n
        n = int(round(n * 1.5))


def integrate_cone(func, dim, pivot, lo, hi, settings, atol=0.0):
    """Integrate ``func(points) -> values`` over a cone region, refining the
    node count until two successive estimates agree to ``settings.rel_tol``
    (or to the absolute floor ``atol``, for pieces of a larger total).

    Raises
    ------
    NumericError
        If ``settings.max_nodes`` is reached first; ``estimate`` holds the
        last value.
    """
    if dim == 0:
        return float(func(np.empty((1, 0))))
    prev = None
    val = None
    for n in _node_schedule(settings.nodes, settings.max_nodes):
        pts, w = cone_rule(dim, pivot, lo, hi, n)
        val = float(w @ func(pts))
        if prev is not None:
            diff = abs(val - prev)
            if diff <= settings.rel_tol * abs(val) + atol or (val == 0.0 and prev == 0.0):
                return val
        prev = val
    log.debug("cone quadrature stalled: dim=%d pivot=%d [%g, %g] value=%g",
              dim, pivot, lo, hi, val)
    raise NumericError(
        f"quadrature did not reach rel_tol={settings.rel_tol:g} "
        f"with {settings.max_nodes} nodes per axis", estimate=val)
