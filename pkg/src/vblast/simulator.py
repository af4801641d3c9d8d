"""Monte Carlo counterpart of the analytic layer-gain law.

Trials are generated in fixed-size blocks from counter-based streams, so the
output is identical whatever ``workers`` is set to.
"""

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .channel import greedy_gains_batch, sample_channels, unordered_gains_batch
from .errors import ParameterError

__all__ = [
    "BLOCK",
    "WORKERS_ENV",
    "GainSamples",
    "EmpiricalCdf",
    "CensusResult",
    "ProbeResult",
    "default_workers",
    "simulate_gains",
    "permutation_census",
    "independence_probe",
    "sample_row_exponential",
    "gaussian_rows",
    "empirical_cdf",
    "histogram",
    "ks_distance",
    "write_samples_csv",
]

BLOCK = 1 << 15
WORKERS_ENV = "VBLAST_WORKERS"


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _check(t, r, m, n_trials):
    if not 1 <= t <= r:
        raise ParameterError(f"need 1 <= t <= r, got t={t}, r={r}")
    if not 1 <= m <= t:
        raise ParameterError(f"need 1 <= m <= t, got m={m}")
    if n_trials < 1:
        raise ParameterError("n_trials must be >= 1")


def _blocks(n_trials):
    return [(a, min(a + BLOCK, n_trials)) for a in range(0, n_trials, BLOCK)]


def _map_blocks(fn, n_trials, workers):
    blocks = _blocks(n_trials)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(blocks) == 1:
        return [fn(a, b) for a, b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), blocks))


@dataclass(frozen=True)
class GainSamples:
    """``gains[k]`` holds the first ``m`` greedy gains of trial ``k``."""

    t: int
    r: int
    m: int
    seed: int
    gains: np.ndarray

    @property
    def n_trials(self):
        return self.gains.shape[0]

    def layer(self, i):
        return self.gains[:, i - 1]


def simulate_gains(t, r, m, n_trials, seed, workers=None):
    """Draw ``n_trials`` channels and record their first ``m`` greedy gains.

    Row ``k`` equals ``greedy_decompose(sample_channel(t, r, seed, k)).gains[:m]``.
    """
    _check(t, r, m, n_trials)

    def run(a, b):
        gains, _ = greedy_gains_batch(sample_channels(t, r, seed, a, b))
        return gains[:, :m]

    gains = np.concatenate(_map_blocks(run, n_trials, workers))
    return GainSamples(t, r, m, int(seed), gains)


@dataclass(frozen=True)
class CensusResult:
    counts: dict
    chi2: float
    pvalue: float


def permutation_census(t, r, n_trials, seed, workers=None):
    """Count how often each decoding order is chosen.

    Orders are keyed by 1-based antenna tuples.  Under IID Rayleigh fading
    every order is equally likely; ``chi2``/``pvalue`` test that against the
    uniform distribution.
    """
    _check(t, r, 1, n_trials)
    if t > 6:
        raise ParameterError("permutation census limited to t <= 6")
    perms = list(itertools.permutations(range(t)))
    index = {p: k for k, p in enumerate(perms)}
    # encode each permutation as a base-t integer for bincount
    codes = {sum(v * t ** (t - 1 - i) for i, v in enumerate(p)): k for p, k in index.items()}
    lookup = np.full(t ** t, -1, dtype=np.int64)
    for code, k in codes.items():
        lookup[code] = k
    powers = t ** np.arange(t - 1, -1, -1)

    def run(a, b):
        _, perm = greedy_gains_batch(sample_channels(t, r, seed, a, b))
        return np.bincount(lookup[perm @ powers], minlength=len(perms))

    totals = np.sum(_map_blocks(run, n_trials, workers), axis=0)
    counts = {tuple(v + 1 for v in p): int(totals[k]) for p, k in index.items()}
    if len(perms) == 1:
        return CensusResult(counts, 0.0, 1.0)
    chi2, pvalue = stats.chisquare(totals)
    return CensusResult(counts, float(chi2), float(pvalue))


@dataclass(frozen=True)
class ProbeResult:
    """Cross-row covariance and squared-norm correlation estimates.

    ``max_abs_cov`` is the largest magnitude over entries of the sample
    means of ``w_ij w_pq^H`` for ``i != p``; ``max_z`` the same expressed in
    standard errors.  ``correlations`` maps ``((i, j), (p, q))`` (1-based) to
    the sample correlation of ``v_ij`` and ``v_pq`` for every pair of table
    entries, same-row pairs included.
    """

    max_abs_cov: float
    max_z: float
    n_trials: int
    correlations: dict


def _projected_vectors(h, m):
    """w_ij = P_{1:j-1} h_i for the natural column order, as a dict."""
    res = np.array(h, dtype=complex, copy=True)
    t = res.shape[2]
    w = {}
    for j in range(m):
        for i in range(j, t):
            w[(i + 1, j + 1)] = res[:, :, i].copy()
        if j == m - 1:
            break
        q = res[:, :, j] / np.linalg.norm(res[:, :, j], axis=1)[:, None]
        proj = np.einsum("nr,nrt->nt", q.conj(), res)
        res -= q[:, :, None] * proj[:, None, :]
    return w


def independence_probe(t, r, m, n_trials, seed):
    """Empirical check that projected vectors from different table rows are
    uncorrelated, ``E{w_ij w_pq^H} = 0`` for ``i != p``."""
    _check(t, r, m, n_trials)
    keys = [(i, j) for i in range(1, t + 1) for j in range(1, min(i, m) + 1)]
    s1 = {}
    s2 = {}
    norms = {k: [] for k in keys}
    for a, b in _blocks(n_trials):
        w = _projected_vectors(sample_channels(t, r, seed, a, b), m)
        for k in keys:
            norms[k].append(np.sum(np.abs(w[k]) ** 2, axis=1))
        for ka, kb in itertools.combinations(keys, 2):
            if ka[0] == kb[0]:
                continue
            outer = w[ka][:, :, None] * w[kb][:, None, :].conj()
            s1[(ka, kb)] = s1.get((ka, kb), 0) + outer.sum(axis=0)
            s2[(ka, kb)] = s2.get((ka, kb), 0) + (np.abs(outer) ** 2).sum(axis=0)
    max_abs, max_z = 0.0, 0.0
    for key in s1:
        mean = s1[key] / n_trials
        var = s2[key] / n_trials - np.abs(mean) ** 2
        se = np.sqrt(np.maximum(var, 1e-300) / n_trials)
        max_abs = max(max_abs, float(np.abs(mean).max()))
        max_z = max(max_z, float((np.abs(mean) / se).max()))
    v = {k: np.concatenate(norms[k]) for k in keys}
    corr = {}
    for ka, kb in itertools.combinations(keys, 2):
        corr[(ka, kb)] = float(np.corrcoef(v[ka], v[kb])[0, 1])
    return ProbeResult(max_abs, max_z, n_trials, corr)


def sample_row_exponential(r, i, m, seed, size=None):
    """Row ``i`` of the unordered table built from exponentials alone.

    Draws ``r`` IID unit exponentials ``b_1..b_r`` and returns the suffix sums
    ``b_j + ... + b_r`` for ``j = 1..min(i, m)``; no linear algebra involved.
    """
    if i < 1 or m < 1:
        raise ParameterError("need i >= 1 and m >= 1")
    q = min(i, m)
    if r < q:
        raise ParameterError(f"need r >= {q}")
    rng = np.random.Generator(np.random.Philox(key=_row_key(seed, i)))
    n = 1 if size is None else int(size)
    beta = rng.standard_exponential((n, r))
    suffix = np.cumsum(beta[:, ::-1], axis=1)[:, ::-1]
    out = suffix[:, :q]
    return out[0] if size is None else out


def _row_key(seed, i):
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=(1 << 20, int(i)))
    return ss.generate_state(2, dtype=np.uint64)


def gaussian_rows(t, r, m, n_trials, seed):
    """Unordered table rows from Gaussian channels, as a list of arrays."""
    _check(t, r, m, n_trials)
    parts = [unordered_gains_batch(sample_channels(t, r, seed, a, b), m)
             for a, b in _blocks(n_trials)]
    return [np.concatenate([p[i] for p in parts]) for i in range(t)]


class EmpiricalCdf:
    """Right-continuous step CDF of a sample."""

    def __init__(self, samples):
        self.samples = np.sort(np.asarray(samples, dtype=float).ravel())
        if self.samples.size == 0:
            raise ParameterError("empty sample")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.samples, x, side="right") / self.samples.size
        return float(out) if out.ndim == 0 else out

    def __len__(self):
        return self.samples.size


def empirical_cdf(samples, layer):
    return EmpiricalCdf(samples.layer(layer))


def histogram(samples, layer, bins=100, range=None):
    """Density histogram of one layer's gains.

    Counts are divided by the total number of trials (not just those in
    range), so the densities estimate the true PDF and integrate to the
    in-range fraction.  The default range covers every sample.

    Returns
    -------
    edges : ndarray, shape (bins + 1,)
    density : ndarray, shape (bins,)
    """
    x = samples.layer(layer)
    if range is None:
        range = (0.0, float(max(x.max(), 1e-12)))
    counts, edges = np.histogram(x, bins=bins, range=range)
    return edges, counts / (x.size * np.diff(edges))


def ks_distance(cdf, ecdf, grid):
    """max over ``grid`` of |cdf(x) - ecdf(x)|, also checking left limits."""
    grid = np.asarray(grid, dtype=float)
    f = np.asarray(cdf(grid), dtype=float)
    right = ecdf(grid)
    left = np.searchsorted(ecdf.samples, grid, side="left") / len(ecdf)
    return float(max(np.abs(f - right).max(), np.abs(f - left).max()))


def write_samples_csv(samples, path, header_lines=()):
    """Dump one row per trial, columns ``gamma_1 .. gamma_m``."""
    cols = ",".join(f"gamma_{i}" for i in range(1, samples.m + 1))
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(cols + "\n")
        np.savetxt(fh, samples.gains, fmt="%.9g", delimiter=",")
