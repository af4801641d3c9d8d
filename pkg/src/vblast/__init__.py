"""Layer-gain statistics of greedy-ordered zero-forcing V-BLAST receivers.

The package provides closed-form and numerical expressions for the joint and
marginal laws of the post-detection layer gains, a reproducible Monte Carlo
simulator, and outage / power-allocation tools built on top of them.
"""

__version__ = "0.1.0"

from .channel import GreedyDecomposition, greedy_decompose, sample_channel, unordered_gains
from .combinatorics import (catalan, constrained_compositions, integral_Ij, integral_J,
                            wilks_g)
from .distribution import (LayerLaw, NoOrderingLaw, diversity_order, diversity_slope,
                           inverse_cdf, joint_pdf, marginal_cdf, marginal_pdf,
                           unordered_row_pdf)
from .errors import DegenerateInputError, NumericError, ParameterError
from .power import (PowerAllocation, activation_eps, activation_power, eps_outage_capacity,
                    feedback_bits, layer_thresholds, outage_probability, waterfill,
                    waterfill_gains)
from .quadrature import QuadratureSettings
from .simulator import (empirical_cdf, histogram, independence_probe, permutation_census,
                        sample_row_exponential, simulate_gains)

__all__ = [
    "GreedyDecomposition", "greedy_decompose", "sample_channel", "unordered_gains",
    "catalan", "constrained_compositions", "integral_Ij", "integral_J", "wilks_g",
    "LayerLaw", "NoOrderingLaw", "diversity_order", "diversity_slope", "inverse_cdf",
    "joint_pdf", "marginal_cdf", "marginal_pdf", "unordered_row_pdf",
    "DegenerateInputError", "NumericError", "ParameterError",
    "PowerAllocation", "activation_eps", "activation_power", "eps_outage_capacity",
    "feedback_bits", "layer_thresholds", "outage_probability", "waterfill",
    "waterfill_gains", "QuadratureSettings", "empirical_cdf", "histogram",
    "independence_probe", "permutation_census", "sample_row_exponential",
    "simulate_gains",
]
