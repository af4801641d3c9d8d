"""Closed-form pieces of the ordered-gain density.

Everything here works on *ordered gain vectors* stored first-to-last,
``g[..., 0] >= g[..., 1] >= ...``, and broadcasts over leading axes so the
quadrature code can evaluate thousands of points per call.

The building blocks are

* constrained integer compositions (the index set of Wilks' formula),
* Wilks' G function, the volume of a nested simplex-like region,
* ``integral_Ij``: the nested exponential integral attached to layer ``j``,
* ``integral_J``: its polynomially weighted integral over the last gain,
* integer-order incomplete gamma functions.
"""

import math
from functools import lru_cache

import numpy as np

from .errors import ParameterError

__all__ = [
    "MAX_COMPOSITION_ORDER",
    "factorial",
    "constrained_compositions",
    "catalan",
    "wilks_g",
    "integral_Ij",
    "integral_J",
    "upper_gamma_int",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
]

# Catalan(13) = 742900 terms; beyond this the sums are impractical.
MAX_COMPOSITION_ORDER = 12

_EXACT_FACTORIALS = tuple(math.factorial(i) for i in range(21))
_ORDER_TOL = 1e-12


def factorial(n):
    """n! as an exact int for n <= 20, as a float above."""
    if n < 0:
        raise ParameterError(f"factorial of negative number {n}")
    if n <= 20:
        return _EXACT_FACTORIALS[n]
    return math.gamma(n + 1.0)


def catalan(n):
    return math.comb(2 * n, n) // (n + 1)


# --------------------------------------------------------------------------
# compositions

@lru_cache(maxsize=None)
def _compositions(k):
    out = []

    def extend(prefix, total):
        n = len(prefix)
        if n == k:
            out.append(prefix + (k + 1 - total,))
            return
        # prefix sum of the first n+1 parts may not exceed n+1
        for b in range(0, n + 2 - total):
            extend(prefix + (b,), total + b)

    extend((), 0)
    # lexicographic order read from the last part backwards
    out.sort(key=lambda b: b[::-1])
    return tuple(out)


def constrained_compositions(k):
    """All nonnegative ``(b_1, ..., b_{k+1})`` summing to ``k + 1`` whose
    prefix sums satisfy ``b_1 + ... + b_n <= n`` for ``n = 1..k``.

    There are Catalan(k + 1) of them.  The list is ordered lexicographically
    on ``(b_{k+1}, b_k, ..., b_1)``.

    >>> constrained_compositions(1)
    [(1, 1), (0, 2)]
    """
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    if k > MAX_COMPOSITION_ORDER:
        raise ParameterError(
            f"k={k} exceeds the enumeration cap {MAX_COMPOSITION_ORDER} "
            f"({catalan(k + 2)} terms)")
    return list(_compositions(k))


@lru_cache(maxsize=None)
def _wilks_table(k):
    comps = _compositions(k)
    parts = np.array(comps, dtype=np.int64).reshape(len(comps), k + 1)
    coef = np.array([1.0 / math.prod(factorial(b) for b in c) for c in comps])
    # column n holds the exponent of the n-th difference (alpha_1 first)
    exponents = parts[:, ::-1].copy()
    return exponents, coef


def _wilks(alpha):
    """Unchecked, vectorised G over the last axis of ``alpha``."""
    k = alpha.shape[-1] - 1
    exponents, coef = _wilks_table(k)
    diffs = np.concatenate([alpha[..., :1], np.diff(alpha, axis=-1)], axis=-1)
    terms = np.prod(diffs[..., None, :] ** exponents, axis=-1)
    return terms @ coef


def wilks_g(alpha):
    """Wilks' nested integral

    ``G(a_1..a_{k+1}) = int_0^{a_1} int_{x_{k+1}}^{a_2} ... int_{x_2}^{a_{k+1}} dx_1 ... dx_{k+1}``

    evaluated as a finite sum over :func:`constrained_compositions`.

    Parameters
    ----------
    alpha : array_like, shape (..., k+1)
        Nondecreasing, nonnegative along the last axis.

    Returns
    -------
    float or ndarray
    """
    a = np.asarray(alpha, dtype=float)
    if a.ndim == 0:
        a = a[None]
    if a.shape[-1] - 1 > MAX_COMPOSITION_ORDER:
        raise ParameterError("too many arguments for wilks_g")
    if np.any(a < 0) or np.any(np.diff(a, axis=-1) < -_ORDER_TOL):
        raise ParameterError("wilks_g needs 0 <= a_1 <= a_2 <= ...")
    out = _wilks(a)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# incomplete gamma, integer order

def regularized_upper_gamma(s, x):
    """Q(s, x) = Gamma(s, x) / (s-1)! for integer ``s >= 1``.

    Uses the finite sum ``exp(-x) sum_{k<s} x^k / k!`` which has no
    cancellation.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    total = np.zeros_like(x)
    for k in range(s):
        if k == 0:
            total = total + np.exp(-x)
        else:
            total = total + np.exp(k * logx - x - math.lgamma(k + 1))
    return total


def regularized_lower_gamma(s, x):
    """P(s, x) = 1 - Q(s, x) for integer ``s >= 1``, accurate for tiny x.

    Below ``x = s + 1`` the power series
    ``x^s e^{-x} / s! * (1 + x/(s+1) + x^2/((s+1)(s+2)) + ...)`` is summed so
    that P keeps full relative precision as ``x -> 0``.
    """
    if s < 1:
        raise ParameterError(f"order must be a positive integer, got {s}")
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < s + 1
    if np.any(small):
        xs = x[small]
        with np.errstate(divide="ignore"):
            term = np.exp(s * np.log(xs) - xs - math.lgamma(s + 1))
        total = term.copy()
        i = 1
        while i < 1000:
            term = term * xs / (s + i)
            total += term
            if not np.any(term > 1e-17 * total):
                break
            i += 1
        out[small] = total
    big = ~small
    if np.any(big):
        out[big] = 1.0 - regularized_upper_gamma(s, x[big])
    return out if out.ndim else float(out)


def upper_gamma_int(s, x):
    """Upper incomplete gamma Gamma(s, x) for positive integer ``s``.

    ``Gamma(s, x) = (s-1)! e^{-x} sum_{k=0}^{s-1} x^k / k!``.
    """
    if s < 1 or int(s) != s:
        raise ParameterError(f"s must be a positive integer, got {s}")
    if np.any(np.asarray(x) < 0):
        raise ParameterError("x must be nonnegative")
    out = factorial(int(s) - 1) * regularized_upper_gamma(int(s), x)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# the multiple integrals I_j and J

def _exp_gap(lo, hi):
    """exp(-lo) - exp(-hi) for lo <= hi, without cancellation or overflow."""
    return -np.exp(-lo) * np.expm1(lo - hi)


def _ij(g):
    """Unchecked I_j for ordered ``g`` of length j on the last axis."""
    j = g.shape[-1]
    if j == 1:
        return np.exp(-g[..., 0])
    gj = g[..., j - 1]
    out = _exp_gap(gj, g[..., j - 2])
    for k in range(j - 2):
        # G(g_{j-1}, g_{j-2}, ..., g_{j-k-1}) - G(g_j, g_{j-2}, ..., g_{j-k-1})
        idx = [j - 2 - n for n in range(k + 1)]
        upper = g[..., idx]
        lower = upper.copy()
        lower[..., 0] = gj
        out = out - np.exp(-g[..., j - k - 3]) * (_wilks(upper) - _wilks(lower))
    return np.maximum(out, 0.0)


@lru_cache(maxsize=None)
def _j_terms(k):
    """Per-composition data for the k-th correction sum of J."""
    terms = []
    exponents, coef = _wilks_table(k)
    for e, c in zip(exponents, coef):
        # e[0] = b_{k+1}, e[1] = b_k, e[n] = b_{k+1-n}
        b_top = int(e[0])
        b_next = int(e[1]) if k >= 1 else 0
        rest = tuple(int(v) for v in e[2:])
        terms.append((b_top, b_next, rest, float(c)))
    return tuple(terms)


def _jint(g, r):
    """Unchecked J for ordered ``g`` of length m on the last axis."""
    m = g.shape[-1]
    y = g[..., m - 1]
    if m == 1:
        return regularized_lower_gamma(r, y)
    n = r - m
    fn = float(factorial(n))
    ypow = y ** (n + 1) / float(factorial(n + 1))
    out = regularized_lower_gamma(n + 1, y) - ypow * np.exp(-g[..., m - 2])
    for k in range(m - 2):
        g1 = g[..., m - 2]      # gamma_{m-1}
        g2 = g[..., m - 3]      # gamma_{m-2}
        acc = np.zeros_like(y)
        for b_top, b_next, rest, c in _j_terms(k):
            first = g1 ** b_top * (g2 - g1) ** b_next * ypow
            second = np.zeros_like(y)
            for cc in range(b_next + 1):
                p = b_top + cc + n + 1
                second = second + (math.comb(b_next, cc) * (-1) ** cc / (p * fn)
                                   * g2 ** (b_next - cc) * y ** p)
            weight = c
            for nn, expo in enumerate(rest, start=2):
                if expo:
                    weight = weight * (g[..., m - nn - 2] - g[..., m - nn - 1]) ** expo
            acc = acc + weight * (first - second)
        out = out - np.exp(-g[..., m - k - 3]) * acc
    return np.maximum(out, 0.0)


def _check_ordered(g, name):
    if g.shape[-1] - 2 > MAX_COMPOSITION_ORDER:
        raise ParameterError(f"{name}: vector too long for composition cap")
    if np.any(g < 0):
        raise ParameterError(f"{name}: gains must be nonnegative")
    if np.any(np.diff(g, axis=-1) > _ORDER_TOL * (1.0 + np.abs(g[..., :-1]))):
        raise ParameterError(f"{name}: gains must be nonincreasing")


def integral_Ij(gamma):
    """Nested exponential integral attached to layer ``j = len(gamma)``.

    ``I_1 = exp(-g_1)`` and for ``j >= 2``

    ``I_j = int_{g_j}^{g_{j-1}} int_{v_{j-1}}^{g_{j-2}} ... int_{v_2}^{g_1} exp(-v_1) dv_1 ... dv_{j-1}``

    evaluated in closed form through Wilks' G.  Accepts arrays of shape
    ``(..., j)``.
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim == 0 or g.shape[-1] < 1:
        raise ParameterError("integral_Ij needs at least one gain")
    _check_ordered(g, "integral_Ij")
    out = _ij(g)
    return float(out) if out.ndim == 0 else out


def integral_J(gamma, r):
    """``int_0^{g_m} z^{r-m}/(r-m)! I_m(g_1, ..., g_{m-1}, z) dz``.

    For a single gain this is the regularised lower incomplete gamma
    ``P(r, g_1)``.  It equals the probability that an unordered row of
    projected norms stays below ``g_1, ..., g_m`` entrywise.
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim == 0 or g.shape[-1] < 1:
        raise ParameterError("integral_J needs at least one gain")
    m = g.shape[-1]
    if r < m:
        raise ParameterError(f"integral_J needs r >= m, got r={r}, m={m}")
    _check_ordered(g, "integral_J")
    out = _jint(g, r)
    return float(out) if np.ndim(out) == 0 else out
