"""How the outage target decides which layers get power.

At a fixed total power of 5 dB we sweep the per-layer outage target and
water-fill over the three layers.  A strict target pushes the effective
gain of the last layer, F^-1(eps), towards zero, so that layer drops out.
"""

import numpy as np

from vblast import LayerLaw, activation_eps, layer_thresholds, waterfill_gains
from vblast.power import db_to_linear
from _plot import save

law = LayerLaw(3, 4)
total = db_to_linear(5.0)
eps_grid = np.linspace(0.01, 0.5, 50)

rows = []
for eps in eps_grid:
    g = layer_thresholds(law, eps)
    alloc = waterfill_gains(g, total)
    rows.append(np.concatenate([1 / g, [alloc.mu], alloc.powers]))
rows = np.array(rows)

print("   eps   1/g1    1/g2    1/g3    level   p1     p2     p3")
for eps, row in zip(eps_grid[::7], rows[::7]):
    print(f"{eps:6.3f} " + " ".join(f"{v:6.3f}" for v in row))

cut = activation_eps(law, total, 3)
print(f"\nthe third layer switches on at eps = {cut:.4f}")


def draw(ax):
    for k in range(3):
        ax.plot(eps_grid, rows[:, k], label=f"1/g{k + 1}")
    ax.plot(eps_grid, rows[:, 3], "k--", label="water level")
    ax.axvline(cut, color="grey", lw=0.8)
    ax.set_ylim(0, 6)
    ax.set_xlabel("outage target per layer")
    ax.legend()


save("waterfilling_cutoff.png", draw)
