"""Cross-checks between the closed forms, quadrature oracles and Monte Carlo.

Each check returns a :class:`Check`; :func:`run_all` is what ``vblast
verify`` prints.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import oracles
from .combinatorics import catalan, constrained_compositions, integral_Ij, integral_J, wilks_g
from .distribution import LayerLaw, NoOrderingLaw, diversity_order
from .power import (activation_eps, activation_power, db_to_linear, eps_outage_capacity,
                    layer_thresholds, linear_to_db, waterfill_gains)
from .simulator import (empirical_cdf, gaussian_rows, histogram, independence_probe,
                        ks_distance, permutation_census, sample_row_exponential,
                        simulate_gains)

__all__ = ["Check", "CHECKS", "run_all", "density_distances"]


@dataclass
class Check:
    name: str
    expected: str
    got: float
    tolerance: str
    passed: bool
    seconds: float = 0.0


def _rel(a, b):
    return abs(a - b) / abs(b)


def check_compositions(cfg):
    got = [len(constrained_compositions(k)) for k in range(9)]
    want = [catalan(k + 1) for k in range(9)]
    return Check("composition counts = Catalan C1..C9", str(want), float(sum(got)),
                 "exact", got == want)


def check_closed_forms(cfg):
    rng = np.random.default_rng(cfg.get("seed", 0))
    worst_i = worst_j = worst_g = 0.0
    for j in range(2, 6):
        for _ in range(cfg.get("oracle_draws", 100)):
            g = np.sort(rng.uniform(0, 6, j))[::-1]
            worst_i = max(worst_i, _rel(integral_Ij(g), oracles.integral_Ij_quadrature(g)[0]))
    for m in range(1, 5):
        for _ in range(cfg.get("oracle_draws", 100)):
            g = np.sort(rng.uniform(0, 6, m))[::-1]
            r = int(rng.integers(m, 7))
            worst_j = max(worst_j, _rel(integral_J(g, r), oracles.integral_J_quadrature(g, r)[0]))
    for k in range(5):
        for _ in range(cfg.get("oracle_draws", 100)):
            a = np.sort(rng.uniform(0, 6, k + 1))
            worst_g = max(worst_g, _rel(wilks_g(a), oracles.wilks_g_quadrature(a)[0]))
    worst = max(worst_i / 1e-8, worst_j / 1e-8, worst_g / 1e-7)
    return Check("I_j, J, G closed forms vs nested quadrature (worst rel / tol)",
                 "<= 1", worst, "I,J 1e-8; G 1e-7", worst <= 1.0)


def check_normalization(cfg):
    worst = 0.0
    for t, r in [(2, 2), (3, 4)]:
        law = LayerLaw(t, r)
        mass, _ = oracles.cone_mass(law.joint_pdf, t)
        worst = max(worst, abs(mass - 1.0))
    return Check("joint PDF mass, (2,2,2) and (3,4,3)", "1", 1.0 + worst, "1e-3", worst < 1e-3)


def check_layer1(cfg):
    from scipy.special import gammainc
    worst = 0.0
    for t, r in [(2, 2), (3, 4), (4, 4)]:
        law = LayerLaw(t, r)
        xs = np.linspace(0.1, 3 * r, 40)
        worst = max(worst, float(np.max(np.abs(law.cdf(1, xs, m=2) - gammainc(r, xs) ** t))))
        worst = max(worst, float(np.max(np.abs(law.cdf(1, xs) - gammainc(r, xs) ** t))))
    return Check("layer-1 CDF = P(r,x)^t", "0", worst, "1e-6", worst < 1e-6)


def check_diversity(cfg):
    law = LayerLaw(3, 4)
    worst = 0.0
    for layer in (1, 2, 3):
        want = diversity_order(3, 4, layer)
        worst = max(worst, _rel(law.diversity_slope(layer), want))
    return Check("diversity slopes t=3 r=4 vs {12,6,2}", "0", worst, "5% rel", worst <= 0.05)


def density_distances(samples, law, layers=(2, 3), bins=100, upper=12.0):
    """Per-layer (L1 histogram distance, KS distance) against the analytic law."""
    out = {}
    for layer in layers:
        edges, dens = histogram(samples, layer, bins, (0.0, upper))
        centers = 0.5 * (edges[1:] + edges[:-1])
        l1 = float(np.sum(np.abs(dens - law.pdf(layer, centers)) * np.diff(edges)))
        grid = np.linspace(0.0, upper + 4.0, 321)
        ks = ks_distance(lambda x: law.cdf(layer, x), empirical_cdf(samples, layer), grid)
        out[layer] = (l1, ks)
    return out


def check_densities(cfg):
    s = simulate_gains(3, 4, 3, cfg["trials"], cfg.get("seed", 0) + 1, cfg.get("workers"))
    d = density_distances(s, LayerLaw(3, 4))
    worst_l1 = max(v[0] for v in d.values())
    worst_ks = max(v[1] for v in d.values())
    ok = worst_l1 < 0.02 and worst_ks < 0.005
    return Check("layer 2, 3 density vs histogram: max(L1, KS)", "L1<0.02, KS<0.005",
                 max(worst_l1, worst_ks), "see expected", ok)


def check_permutations(cfg):
    res = permutation_census(3, 4, cfg["trials"], cfg.get("seed", 0) + 2, cfg.get("workers"))
    return Check("decoding orders equiprobable (t=3) chi2 p-value", "> 0.001",
                 res.pvalue, "0.001", res.pvalue > 0.001)


def check_independence(cfg):
    res = independence_probe(2, 2, 2, cfg["trials"], cfg.get("seed", 0) + 3)
    return Check("cross-row E{w w^H} in standard errors", "< 4", res.max_z, "4 SE",
                 res.max_z < 4.0)


def check_exponential_rows(cfg):
    from scipy.stats import ks_2samp
    n = cfg["trials"]
    t, r, m = 3, 4, 3
    rows = gaussian_rows(t, r, m, n, cfg.get("seed", 0) + 4)
    worst = 0.0
    for i in range(1, t + 1):
        alt = sample_row_exponential(r, i, m, cfg.get("seed", 0) + 5, size=n)
        for j in range(min(i, m)):
            worst = max(worst, ks_2samp(rows[i - 1][:, j], alt[:, j]).statistic)
    return Check("exponential-sum rows vs Gaussian rows, KS", "< 0.01", worst, "0.01",
                 worst < 0.01)


def check_layer3_cutoff(cfg):
    eps = activation_eps(LayerLaw(3, 4), db_to_linear(5.0), 3)
    return Check("layer-3 switch-on eps (t=3, r=4, 5 dB)", "0.215", eps, "0.02",
                 abs(eps - 0.215) <= 0.02)


def check_layer4_activation(cfg):
    g = layer_thresholds(LayerLaw(4, 4), 0.1)
    db = float(linear_to_db(activation_power(g, 4)))
    return Check("layer-4 activation power dB (t=r=4, eps=0.1)", "[13, 17]", db,
                 "bracket", 13.0 <= db <= 17.0)


def check_ordering_gain(cfg):
    law, base = LayerLaw(3, 4), NoOrderingLaw(3, 4)
    p = db_to_linear(15.0) / 3
    gap = sum(eps_outage_capacity(law, i, 0.1, p) - eps_outage_capacity(base, i, 0.1, p)
              for i in (1, 2, 3))
    return Check("sum-capacity gain of ordering at 15 dB", "[0.5, 1.5]", gap,
                 "bracket", 0.5 <= gap <= 1.5)


def check_waterfill(cfg):
    rng = np.random.default_rng(cfg.get("seed", 0) + 6)
    worst = 0.0
    ok = True
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        g = np.sort(rng.lognormal(0, 1.5, n))[::-1]
        total = float(10 ** rng.uniform(-2, 3))
        a = waterfill_gains(g, total)
        worst = max(worst, abs(a.powers.sum() - total) / total)
        act = np.array([i - 1 for i in a.active])
        inactive = np.setdiff1d(np.arange(n), act)
        ok &= bool(np.all(a.powers >= 0))
        ok &= bool(np.allclose(a.powers[act], a.mu - 1 / g[act], rtol=1e-12, atol=0))
        ok &= bool(np.all(a.powers[act] > 0))
        ok &= bool(np.all(a.mu <= 1 / g[inactive] * (1 + 1e-12)))
        ok &= list(act) == list(range(len(act)))
    return Check("water-filling budget / KKT / prefix (1000 draws)", "0", worst, "1e-9 rel",
                 ok and worst <= 1e-9)


CHECKS = [
    check_compositions,
    check_closed_forms,
    check_normalization,
    check_layer1,
    check_diversity,
    check_densities,
    check_permutations,
    check_independence,
    check_exponential_rows,
    check_layer3_cutoff,
    check_layer4_activation,
    check_ordering_gain,
    check_waterfill,
]


def run_all(trials=10**6, seed=0, workers=None, oracle_draws=100, progress=None):
    cfg = {"trials": trials, "seed": seed, "workers": workers, "oracle_draws": oracle_draws}
    out = []
    for fn in CHECKS:
        t0 = time.perf_counter()
        c = fn(cfg)
        c.seconds = time.perf_counter() - t0
        out.append(c)
        if progress is not None:
            progress(c)
    return out
