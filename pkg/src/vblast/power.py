"""Outage probability, epsilon-outage capacity and water-filling over layers.

Every function takes a *law*: any object with ``t``, ``cdf(layer, x)`` and
``ppf(layer, eps)`` (``LayerLaw``, ``NoOrderingLaw`` or a stub).  Rates are in
bits/s/Hz, powers linear unless a name ends in ``_db``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import NumericError, ParameterError

__all__ = [
    "PowerAllocation",
    "db_to_linear",
    "linear_to_db",
    "outage_probability",
    "eps_outage_capacity",
    "layer_thresholds",
    "waterfill",
    "waterfill_gains",
    "activation_power",
    "activation_eps",
    "feedback_bits",
]


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(np.asarray(lin, dtype=float))


def outage_probability(law, layer, rate, power):
    """P(log2(1 + gain * power) <= rate) for one layer."""
    if rate <= 0 or power <= 0:
        raise ParameterError("rate and power must be positive")
    return law.cdf(layer, (2.0 ** rate - 1.0) / power)


def eps_outage_capacity(law, layer, eps, power):
    """Largest rate whose outage probability on ``layer`` is ``eps``."""
    if power < 0:
        raise ParameterError("power must be nonnegative")
    if power == 0:
        return 0.0
    return math.log2(1.0 + law.ppf(layer, eps) * power)


def layer_thresholds(law, eps):
    """Inverse CDF values ``g_i = F_i^{-1}(eps)`` for every layer."""
    if not 0 < eps < 1:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    return np.array([law.ppf(i, eps) for i in range(1, law.t + 1)])


@dataclass(frozen=True)
class PowerAllocation:
    """Water-filling solution.

    Attributes
    ----------
    powers : ndarray
        Per-layer power, layer 1 first.
    mu : float
        Water level.
    active : tuple
        1-based layers with positive power.
    total : float
        Total power budget.
    gains : ndarray
        The per-layer effective gains that were water-filled.
    """

    powers: np.ndarray
    mu: float
    active: tuple
    total: float
    gains: np.ndarray

    def rates(self):
        return np.log2(1.0 + self.gains * self.powers)


def waterfill_gains(gains, total):
    """Maximise ``sum log2(1 + g_i p_i)`` subject to ``sum p_i = total``.

    Classic active-set search: try ``k = n, n-1, ...`` strongest channels and
    keep the first ``k`` whose weakest member still sits below the water
    level.
    """
    g = np.asarray(gains, dtype=float)
    if total <= 0:
        raise ParameterError("total power must be positive")
    if np.any(~np.isfinite(g)) or np.any(g <= 0):
        raise NumericError("effective gains must be positive and finite", estimate=g)
    order = np.argsort(-g, kind="stable")
    inv = 1.0 / g[order]
    for k in range(len(g), 0, -1):
        mu = (total + inv[:k].sum()) / k
        if mu - inv[k - 1] > 0:
            break
    powers = np.zeros_like(g)
    powers[order[:k]] = mu - inv[:k]
    active = tuple(sorted(int(i) + 1 for i in order[:k]))
    return PowerAllocation(powers, float(mu), active, float(total), g)


def waterfill(law, eps, total):
    """Water-fill ``total`` over the layers of ``law`` at common outage ``eps``.

    ``p_i = (mu - 1/F_i^{-1}(eps))_+`` with ``mu`` fixed by the budget.
    """
    return waterfill_gains(layer_thresholds(law, eps), total)


def activation_power(gains, layer):
    """Smallest total power at which ``layer`` (1-based, by gain rank) gets
    positive power: ``sum_{i<layer} (1/g_layer - 1/g_i)`` for gains sorted
    in decreasing order."""
    g = np.sort(np.asarray(gains, dtype=float))[::-1]
    inv = 1.0 / g
    return float(np.sum(inv[layer - 1] - inv[: layer - 1]))


def activation_eps(law, total, layer, lo=1e-4, hi=0.999):
    """Outage target at which ``layer`` starts receiving power under a fixed
    budget ``total``.  Below the returned value the layer is switched off.

    Raises
    ------
    NumericError
        If the layer is active (or inactive) across the whole ``[lo, hi]``.
    """
    def margin(eps):
        return total - activation_power(layer_thresholds(law, eps), layer)

    a, b = margin(lo), margin(hi)
    if a * b > 0:
        raise NumericError(
            f"layer {layer} does not switch on between eps={lo} and eps={hi}")
    return float(optimize.brentq(margin, lo, hi, xtol=1e-10))


def feedback_bits(t):
    """Bits needed to signal a decoding order: ``log2(t!)`` and its ceiling."""
    if t < 1:
        raise ParameterError("t must be >= 1")
    exact = math.log2(math.factorial(t))
    return exact, math.ceil(exact - 1e-12)
