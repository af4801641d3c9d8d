"""Channel sampling, orthogonal-complement projectors and greedy ordered
decomposition of small complex matrices.

Random draws are counter based: trial ``k`` of seed ``s`` always reads the
same Philox blocks, so any batching or worker split reproduces the same
matrices bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError

__all__ = [
    "RANK_TOL",
    "GreedyDecomposition",
    "sample_channel",
    "sample_channels",
    "complement_projector",
    "greedy_decompose",
    "greedy_gains_batch",
    "unordered_gains",
    "unordered_gains_batch",
]

RANK_TOL = 1e-10

_TWO_PI = 2.0 * np.pi
_U53 = 2.0 ** -53


def _check_dims(t, r):
    if not (isinstance(t, (int, np.integer)) and isinstance(r, (int, np.integer))):
        raise ParameterError("t and r must be integers")
    if t < 1 or t > r:
        raise ParameterError(f"need 1 <= t <= r, got t={t}, r={r}")


def _philox_key(seed):
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1))
    return ss.generate_state(2, dtype=np.uint64)


def _blocks_per_trial(t, r):
    # two uint64 per complex entry, four uint64 per Philox block
    return -(-2 * r * t // 4)


def sample_channels(t, r, seed, start, stop):
    """Channel matrices for trials ``start .. stop-1`` of stream ``seed``.

    Returns
    -------
    ndarray, shape (stop - start, r, t), complex128
        Entries are IID circularly symmetric CN(0, 1).
    """
    _check_dims(t, r)
    n = stop - start
    if n < 0 or start < 0:
        raise ParameterError("need 0 <= start <= stop")
    q = _blocks_per_trial(t, r)
    bg = np.random.Philox(key=_philox_key(seed))
    state = bg.state
    state["state"]["counter"] = np.array([start * q, 0, 0, 0], dtype=np.uint64)
    bg.state = state
    raw = bg.random_raw(n * 4 * q).reshape(n, 4 * q)[:, : 2 * r * t]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * _U53  # (0, 1]
    u1, u2 = u[:, 0::2], u[:, 1::2]
    # Box-Muller in polar form: |z|^2 ~ Exp(1), phase uniform
    z = np.sqrt(-np.log(u1)) * np.exp(1j * _TWO_PI * u2)
    return z.reshape(n, r, t)


def sample_channel(t, r, seed, trial=0):
    """One ``r x t`` Rayleigh channel, deterministic in ``(seed, trial)``."""
    return sample_channels(t, r, seed, trial, trial + 1)[0]


def _orthonormalize(basis):
    """Gram-Schmidt with one re-orthogonalisation pass."""
    r, k = basis.shape
    q = np.zeros((r, k), dtype=complex)
    for j in range(k):
        v = basis[:, j].astype(complex)
        for _ in range(2):
            v = v - q[:, :j] @ (q[:, :j].conj().T @ v)
        q[:, j] = v / np.linalg.norm(v)
    return q


def _min_singular(a):
    if a.shape[1] == 0:
        return np.inf
    lam = np.linalg.eigvalsh(a.conj().T @ a)
    return float(np.sqrt(max(lam[0], 0.0)))


def complement_projector(basis):
    """Projector onto the orthogonal complement of ``span(basis)``.

    Parameters
    ----------
    basis : array_like, shape (r, k)
        Columns are the spanning vectors, ``0 <= k < r``.

    Returns
    -------
    ndarray, shape (r, r)
        Hermitian, idempotent, annihilates every basis column.
    """
    b = np.asarray(basis)
    if b.ndim != 2:
        raise ParameterError("basis must be a 2-D array with vectors as columns")
    r, k = b.shape
    if k >= r:
        raise ParameterError(f"need fewer than r={r} basis vectors, got {k}")
    if _min_singular(b) <= RANK_TOL:
        raise DegenerateInputError("basis is rank deficient")
    q = _orthonormalize(b)
    return np.eye(r, dtype=complex) - q @ q.conj().T


@dataclass(frozen=True)
class GreedyDecomposition:
    """Result of greedy ordered QR.

    ``perm[i]`` is the (0-based) antenna decoded at layer ``i + 1``;
    ``gains[i]`` the squared layer gain, ``diag`` the matching diagonal of the
    triangular factor (``gains == diag**2``).
    """

    perm: tuple
    gains: np.ndarray
    diag: np.ndarray


def greedy_gains_batch(h):
    """Greedy ordering on a stack of channels.

    Parameters
    ----------
    h : ndarray, shape (N, r, t)

    Returns
    -------
    gains : ndarray, shape (N, t)
        Nonincreasing along each row.
    perm : ndarray, shape (N, t), int
    """
    res = np.array(h, dtype=complex, copy=True)
    n, _, t = res.shape
    rows = np.arange(n)
    gains = np.empty((n, t))
    perm = np.empty((n, t), dtype=np.int64)
    free = np.ones((n, t), dtype=bool)
    for i in range(t):
        norms = np.einsum("nrt,nrt->nt", res.conj(), res).real
        norms = np.where(free, norms, -np.inf)
        pick = np.argmax(norms, axis=1)  # first maximum: lowest index wins ties
        g = norms[rows, pick]
        gains[:, i] = g
        perm[:, i] = pick
        free[rows, pick] = False
        if i == t - 1:
            break
        q = res[rows, :, pick] / np.sqrt(np.maximum(g, np.finfo(float).tiny))[:, None]
        proj = np.einsum("nr,nrt->nt", q.conj(), res)
        res -= q[:, :, None] * proj[:, None, :]
    return gains, perm


def greedy_decompose(H):
    """Greedy ordered decomposition of one channel matrix.

    Layer ``i`` takes the remaining column with the largest energy after
    projecting out the columns already chosen; ties go to the lowest antenna
    index.

    Raises
    ------
    DegenerateInputError
        If ``H`` has a singular value at or below ``RANK_TOL``.
    """
    H = np.asarray(H)
    if H.ndim != 2:
        raise ParameterError("H must be a 2-D matrix")
    r, t = H.shape
    _check_dims(t, r)
    if _min_singular(H) <= RANK_TOL:
        raise DegenerateInputError("channel matrix is not full column rank")
    gains, perm = greedy_gains_batch(H[None])
    return GreedyDecomposition(tuple(int(p) for p in perm[0]), gains[0], np.sqrt(gains[0]))


def unordered_gains_batch(h, m):
    """Unordered projection table for a stack of channels (natural order).

    Returns
    -------
    list of ndarray
        Entry ``i`` (0-based) has shape ``(N, min(i+1, m))``: column ``j`` is
        the energy of channel column ``i`` after projecting out columns
        ``0..j-1``.
    """
    res = np.array(h, dtype=complex, copy=True)
    n, _, t = res.shape
    if not 1 <= m <= t:
        raise ParameterError(f"need 1 <= m <= t, got m={m}, t={t}")
    table = [np.empty((n, min(i + 1, m))) for i in range(t)]
    for j in range(m):
        norms = np.einsum("nrt,nrt->nt", res.conj(), res).real
        for i in range(j, t):
            table[i][:, j] = norms[:, i]
        if j == m - 1:
            break
        q = res[:, :, j] / np.sqrt(norms[:, j])[:, None]
        proj = np.einsum("nr,nrt->nt", q.conj(), res)
        res -= q[:, :, None] * proj[:, None, :]
    return table


def unordered_gains(H, m):
    """Rows ``v_i = (v_i1, ..., v_{i,min(i,m)})`` for one channel matrix.

    ``v_i1 = ||h_i||^2`` and ``v_ij`` is the energy of ``h_i`` outside
    ``span(h_1, ..., h_{j-1})``.
    """
    H = np.asarray(H)
    if H.ndim != 2:
        raise ParameterError("H must be a 2-D matrix")
    r, t = H.shape
    _check_dims(t, r)
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= t:
        raise ParameterError(f"need 1 <= m <= t, got m={m}, t={t}")
    return [row[0] for row in unordered_gains_batch(H[None], m)]
