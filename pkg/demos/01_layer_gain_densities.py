"""Densities of the ordered layer gains, analytic against simulated.

With three transmit and four receive antennas the greedy receiver peels off
the strongest stream first.  The later layers pay for it: their squared
gains concentrate near zero.  Here we put the exact marginal densities of
layers 2 and 3 next to histograms of a million simulated channels.
"""

import numpy as np

from vblast import LayerLaw, simulate_gains
from vblast.simulator import empirical_cdf, histogram, ks_distance
from _plot import save

t, r = 3, 4
law = LayerLaw(t, r)

# One million channels; each row holds the three greedy gains of a channel.
samples = simulate_gains(t, r, t, 10**6, seed=7)
print(f"simulated {samples.n_trials} channels, mean gains {samples.gains.mean(axis=0)}")

edges = np.linspace(0, 12, 101)
centers = 0.5 * (edges[1:] + edges[:-1])

curves = {}
for layer in (1, 2, 3):
    _, hist = histogram(samples, layer, bins=100, range=(0, 12))
    exact = law.pdf(layer, centers)
    curves[layer] = (exact, hist)
    l1 = np.sum(np.abs(exact - hist) * np.diff(edges))
    ks = ks_distance(lambda x: law.cdf(layer, x), empirical_cdf(samples, layer),
                     np.linspace(0, 16, 401))
    print(f"layer {layer}: L1 distance {l1:.4f}, KS distance {ks:.4f}")

# The mean of each layer gain follows from the density as well; the first
# layer has a visible tail past 12, so integrate further out.
fine = np.linspace(0, 40, 801)
for layer in (1, 2, 3):
    mean = np.trapezoid(fine * law.pdf(layer, fine), fine)
    print(f"layer {layer}: analytic mean {mean:.3f}, simulated {samples.layer(layer).mean():.3f}")


def draw(ax):
    for layer, (exact, hist) in curves.items():
        ax.plot(centers, exact, label=f"layer {layer}, exact")
        ax.plot(centers, hist, ".", ms=3, label=f"layer {layer}, simulated")
    ax.set_xlabel("squared layer gain")
    ax.set_ylabel("density")
    ax.legend(fontsize=7)


save("layer_gain_densities.png", draw)
