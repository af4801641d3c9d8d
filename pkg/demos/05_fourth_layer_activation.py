"""When does the weakest of four layers become worth powering?

Four transmit and four receive antennas, 10% outage per layer.  Under
water-filling the last layer stays silent until the total power exceeds
sum_{i<4} (1/g_4 - 1/g_i).  We compute that point exactly and confirm it
with quantiles of simulated gains.
"""

import numpy as np

from vblast import LayerLaw, activation_power, eps_outage_capacity, layer_thresholds, waterfill
from vblast.power import db_to_linear, linear_to_db
from vblast.simulator import simulate_gains

law, eps = LayerLaw(4, 4), 0.1
g = layer_thresholds(law, eps)
print("10% quantiles of the layer gains:", np.round(g, 4))

start = linear_to_db(activation_power(g, 4))
print(f"layer 4 receives power above {start:.2f} dB total")

sim = simulate_gains(4, 4, 4, 10**6, seed=3)
g_mc = np.quantile(sim.gains, eps, axis=0)
print(f"from simulated quantiles:      {linear_to_db(activation_power(g_mc, 4)):.2f} dB")

print("\n rho_dB  water-filled rates per layer       uniform power rates")
for db in range(0, 26, 3):
    alloc = waterfill(law, eps, db_to_linear(db))
    uni = [eps_outage_capacity(law, i, eps, db_to_linear(db) / 4) for i in range(1, 5)]
    print(f"{db:6d}  " + " ".join(f"{v:5.2f}" for v in alloc.rates()) + "    "
          + " ".join(f"{v:5.2f}" for v in uni))
