"""Outage probability per layer and the diversity each layer enjoys.

Every layer carries a fixed rate of 1 bit/s/Hz and gets a third of the
total power.  At high SNR the outage curve of layer i falls with slope
(t - i + 1)(r - i + 1) on a log-log scale: 12, 6 and 2 here.
"""

import numpy as np

from vblast import LayerLaw, diversity_order, outage_probability
from vblast.power import db_to_linear
from _plot import save

t, r, rate = 3, 4, 1.0
law = LayerLaw(t, r)
rho_db = np.arange(0, 26, 1.0)

table = np.array([[outage_probability(law, layer, rate, p / t) for layer in (1, 2, 3)]
                  for p in db_to_linear(rho_db)])

print(" rho_dB   layer1       layer2       layer3")
for db, row in zip(rho_db[::5], table[::5]):
    print(f"{db:6.1f}  " + "  ".join(f"{v:.3e}" for v in row))

# slope over the last 5 dB, per decade of power
slopes = (np.log10(table[-1]) - np.log10(table[-6])) / 0.5
for layer, s in zip((1, 2, 3), slopes):
    print(f"layer {layer}: fitted slope {s:6.2f}, diversity order {diversity_order(t, r, layer)}")

# the same exponents straight from the small-argument CDF
for layer in (1, 2, 3):
    print(f"layer {layer}: CDF slope near zero {law.diversity_slope(layer):.3f}")


def draw(ax):
    for k in range(3):
        ax.semilogy(rho_db, table[:, k], label=f"layer {k + 1}")
    ax.set_xlabel("total power (dB)")
    ax.set_ylabel("outage probability")
    ax.set_ylim(1e-8, 1)
    ax.legend()


save("outage_per_layer.png", draw)
