"""Exact law of the greedy-ordered zero-forcing V-BLAST squared layer gains.

For ``t`` transmit and ``r >= t`` receive antennas under IID Rayleigh fading
the first ``m`` ordered gains have density

    f(g_1..g_m) = t!/(t-m)! * prod_{j<=m} g_j^{r-j}/(r-j)! I_j(g_1..g_j)
                  * J_m(g_1..g_m)^{t-m}

on ``g_1 >= ... >= g_m >= 0`` (see :mod:`vblast.combinatorics` for ``I_j``
and ``J_m``).  Marginal densities and CDFs are obtained by integrating this
over the ordered cone; the innermost coordinate is always integrated in
closed form because ``dJ_m/dg_m = g_m^{r-m}/(r-m)! I_m``.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .combinatorics import _ij, _jint, factorial, regularized_lower_gamma
from .errors import NumericError, ParameterError
from .quadrature import QuadratureSettings, integrate_cone

log = logging.getLogger(__name__)

__all__ = [
    "LayerLaw",
    "NoOrderingLaw",
    "QuadratureSettings",
    "joint_pdf",
    "unordered_row_pdf",
    "marginal_pdf",
    "marginal_cdf",
    "inverse_cdf",
    "diversity_slope",
    "diversity_order",
]

SLOPE_GRID = (1e-3, 3e-3, 1e-2)
INVERSE_TOL = 1e-6


def diversity_order(t, r, layer):
    """(t - i + 1)(r - i + 1), the small-argument CDF exponent of layer i."""
    return (t - layer + 1) * (r - layer + 1)


def _leading(r, g):
    """prod_{j<=d} g_j^{r-j}/(r-j)! I_j for the d columns of ``g``."""
    out = np.ones(g.shape[:-1])
    for j in range(1, g.shape[-1] + 1):
        out = out * g[..., j - 1] ** (r - j) / factorial(r - j) * _ij(g[..., :j])
    return out


def _ordered_mask(g):
    ok = np.all(g >= 0, axis=-1)
    if g.shape[-1] > 1:
        ok &= np.all(np.diff(g, axis=-1) <= 0, axis=-1)
    return ok


@dataclass(frozen=True)
class LayerLaw:
    """Distribution of the first ``m`` greedy-ordered squared layer gains.

    Parameters
    ----------
    t, r : int
        Transmit and receive antenna counts, ``1 <= t <= r``.
    m : int, optional
        Number of leading layers in :meth:`joint_pdf`; defaults to ``t``.
    quad : QuadratureSettings
        Accuracy settings for every integral this law evaluates.
    """

    t: int
    r: int
    m: int | None = None
    quad: QuadratureSettings = field(default_factory=QuadratureSettings)

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.t)
        if not (isinstance(self.t, (int, np.integer)) and isinstance(self.r, (int, np.integer))):
            raise ParameterError("t and r must be integers")
        if not 1 <= self.m <= self.t <= self.r:
            raise ParameterError(
                f"need 1 <= m <= t <= r, got m={self.m}, t={self.t}, r={self.r}")

    @property
    def gamma_max(self):
        return self.quad.upper(self.r)

    # convenience methods; the module-level functions carry the docs
    def joint_pdf(self, gamma):
        return joint_pdf(self, gamma)

    def pdf(self, layer, x, m=None):
        return marginal_pdf(self, layer, x, m)

    def cdf(self, layer, x, m=None):
        return marginal_cdf(self, layer, x, m)

    def ppf(self, layer, eps):
        return inverse_cdf(self, layer, eps)

    def diversity_slope(self, layer):
        return diversity_slope(self, layer)

    def _check_layer(self, layer, m=None):
        m = layer if m is None else m
        if not 1 <= layer <= m <= self.t:
            raise ParameterError(
                f"need 1 <= layer <= m <= t, got layer={layer}, m={m}, t={self.t}")
        return m


@dataclass(frozen=True)
class NoOrderingLaw:
    """Baseline without reordering: layer ``i`` sees ``v_ii``, a chi-squared
    variable with ``2(r - i + 1)`` degrees of freedom (scaled so its mean is
    ``r - i + 1``)."""

    t: int
    r: int

    def __post_init__(self):
        if not 1 <= self.t <= self.r:
            raise ParameterError(f"need 1 <= t <= r, got t={self.t}, r={self.r}")

    def _shape(self, layer):
        if not 1 <= layer <= self.t:
            raise ParameterError(f"layer must lie in 1..{self.t}")
        return self.r - layer + 1

    def pdf(self, layer, x):
        s = self._shape(layer)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, x ** (s - 1) * np.exp(-x) / factorial(s - 1), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, layer, x):
        s = self._shape(layer)
        return regularized_lower_gamma(s, np.maximum(np.asarray(x, dtype=float), 0.0))

    def ppf(self, layer, eps):
        if not 0 < eps < 1:
            raise ParameterError(f"eps must lie in (0, 1), got {eps}")
        return float(special.gammaincinv(self._shape(layer), eps))


# --------------------------------------------------------------------------
# densities

def _joint_density(t, r, g):
    m = g.shape[-1]
    pref = math.perm(t, m)
    out = pref * _leading(r, g)
    if t > m:
        out = out * _jint(g, r) ** (t - m)
    return out


def joint_pdf(law, gamma):
    """Joint density of the first ``law.m`` ordered squared layer gains.

    Parameters
    ----------
    law : LayerLaw
    gamma : array_like, shape (..., m)
        Gain vectors, first layer first.

    Returns
    -------
    float or ndarray
        Zero outside the support ``g_1 >= ... >= g_m >= 0``.
    """
    g = np.asarray(gamma, dtype=float)
    if g.shape[-1:] != (law.m,):
        raise ParameterError(f"expected gain vectors of length {law.m}, got shape {g.shape}")
    ok = _ordered_mask(g)
    if not np.all(ok):
        log.debug("joint_pdf: %d argument(s) outside the ordered support",
                  int(np.size(ok) - np.count_nonzero(ok)))
    safe = np.where(ok[..., None], g, 0.0)
    out = np.where(ok, _joint_density(law.t, law.r, safe), 0.0)
    return float(out) if out.ndim == 0 else out


def unordered_row_pdf(r, i, m, v):
    """Density of row ``i`` of the unordered projection table.

    ``v = (v_i1, ..., v_{i,min(i,m)})`` holds the squared norms of column
    ``i`` after projecting out the first ``0, 1, ...`` columns.  Rows are
    mutually independent, so the full table density is the product over
    rows.
    """
    v = np.asarray(v, dtype=float)
    q = min(i, m)
    if v.shape[-1:] != (q,):
        raise ParameterError(f"row {i} with m={m} needs {q} entries, got shape {v.shape}")
    if r < q:
        raise ParameterError(f"need r >= {q}")
    ok = _ordered_mask(v)
    last = np.where(ok, v[..., q - 1], 0.0)
    first = np.where(ok, v[..., 0], 0.0)
    out = np.where(ok, last ** (r - q) / factorial(r - q) * np.exp(-first), 0.0)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# marginals

def _reduced(t, r, m, pts, y):
    """Density of g_1..g_{m-1} with g_m integrated over [0, y]."""
    pref = math.perm(t, m) / (t - m + 1)
    full = np.concatenate([pts, y[:, None]], axis=-1)
    return pref * _leading(r, pts) * _jint(full, r) ** (t - m + 1)


def _max_law_pdf(t, r, x):
    return t * x ** (r - 1) * np.exp(-x) / factorial(r - 1) * regularized_lower_gamma(r, x) ** (t - 1)


def _check_x(x):
    x = float(x)
    if not math.isfinite(x) and x != math.inf:
        raise ParameterError(f"x must be a number, got {x}")
    return x


def _pdf_scalar(law, layer, x, m):
    t, r = law.t, law.r
    if x <= 0:
        return 0.0
    if m == 1:
        return float(_max_law_pdf(t, r, x))
    if layer == m:
        return integrate_cone(lambda p: _joint_density(t, r, p), m, m, x, x, law.quad)
    d = m - 1
    return integrate_cone(lambda p: _reduced(t, r, m, p, p[:, d - 1]), d, layer, x, x, law.quad)


def marginal_pdf(law, layer, x, m=None):
    """Density of the ``layer``-th squared gain at ``x``.

    The joint density of the first ``m`` gains (default ``m = layer``) is
    integrated over the ``layer - 1`` gains above ``x`` and the
    ``m - layer`` gains below it.  Any admissible ``m`` gives the same value
    up to quadrature error.

    Raises
    ------
    NumericError
        When the quadrature cannot meet ``law.quad.rel_tol``; the exception
        carries the achieved estimate.
    """
    m = law._check_layer(layer, m)
    xs = np.asarray(x, dtype=float)
    out = np.array([_pdf_scalar(law, layer, _check_x(v), m) for v in xs.ravel()])
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


@lru_cache(maxsize=4096)
def _cdf_scalar(law, layer, x, m):
    t, r = law.t, law.r
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if m == 1:
        return float(regularized_lower_gamma(r, x) ** t)
    d = m - 1
    if layer == m:
        # the last modelled gain is integrated in closed form up to min(x, g_d);
        # each piece only needs to be accurate relative to the sum
        above = integrate_cone(lambda p: _reduced(t, r, m, p, np.full(len(p), x)),
                               d, d, x, math.inf, law.quad)
        below = integrate_cone(lambda p: _reduced(t, r, m, p, p[:, d - 1]),
                               d, d, 0.0, x, law.quad, atol=law.quad.rel_tol * above)
        total = below + above
    else:
        total = integrate_cone(lambda p: _reduced(t, r, m, p, p[:, d - 1]),
                               d, layer, 0.0, x, law.quad)
    return min(max(total, 0.0), 1.0)


def marginal_cdf(law, layer, x, m=None):
    """CDF of the ``layer``-th squared gain.

    Integrates the joint density of the first ``m`` gains (default
    ``m = layer``) over the ordered cone intersected with ``g_layer <= x``.
    For ``layer = m = 1`` this is the closed form ``P(r, x)^t``.

    Parameters
    ----------
    law : LayerLaw
    layer : int
    x : float or array_like
    m : int, optional
        Number of leading gains in the integrated joint density,
        ``layer <= m <= t``.
    """
    m = law._check_layer(layer, m)
    xs = np.asarray(x, dtype=float)
    out = np.array([_cdf_scalar(law, layer, _check_x(v), m) for v in xs.ravel()])
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


@lru_cache(maxsize=4096)
def _inverse_scalar(law, layer, eps):
    cdf = lambda v: _cdf_scalar(law, layer, float(v), layer)
    hi = law.gamma_max
    for _ in range(60):
        if cdf(hi) >= eps:
            break
        hi *= 2.0
    else:
        raise NumericError(f"could not bracket eps={eps} for layer {layer}")
    x = optimize.brentq(lambda v: cdf(v) - eps, 0.0, hi, xtol=1e-15, rtol=1e-13, maxiter=200)
    got = cdf(x)
    if abs(got - eps) > INVERSE_TOL:
        raise NumericError(
            f"inverse CDF missed target: F({x:g}) = {got:g}, wanted {eps:g}", estimate=x)
    return x


def inverse_cdf(law, layer, eps):
    """Solve ``marginal_cdf(law, layer, x) = eps`` for ``x``.

    The bracket starts at ``[0, law.gamma_max]`` and is doubled until it
    contains the root.  Results are cached per ``(law, layer, eps)``.
    """
    law._check_layer(layer)
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    return _inverse_scalar(law, layer, float(eps))


def diversity_slope(law, layer, grid=SLOPE_GRID):
    """Least-squares slope of ``log F`` against ``log x`` on a small-x grid.

    Approaches ``diversity_order(t, r, layer)`` as the grid shrinks.
    """
    law._check_layer(layer)
    xs = np.asarray(grid, dtype=float)
    fs = marginal_cdf(law, layer, xs)
    if np.any(fs < 1e-300):
        raise NumericError(
            f"CDF underflow on grid {tuple(xs)} (min {fs.min():g}); use larger x",
            estimate=fs)
    slope, _ = np.polyfit(np.log(xs), np.log(fs), 1)
    return float(slope)
