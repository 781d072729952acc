"""Point-to-line geometric last passage percolation.

For each sample an i.i.d. field of geometric weights ``P(w = k) = q (1-q)^k``
is laid on the triangle ``i + j <= 2n`` and the passage times
``L(n + y, n - y)``, ``|y| <= n``, are computed by the usual max-plus
recursion, one anti-diagonal at a time.  The endpoint of the maximizing path
is the argmax ``y`` along the last anti-diagonal.

Every sample draws from its own Philox stream keyed by ``(seed, sample_index)``,
so a batch depends only on its configuration, never on scheduling.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np
from scipy import stats as sps

from .errors import DataError
from .stats import moments

# anti-diagonals drawn per RNG call; bounds scratch memory at ~64 (2n + 1) doubles
_DIAG_BLOCK = 64


@dataclass(frozen=True)
class LppConfig:
    q: float = 0.5
    n: int = 500
    samples: int = 20000
    seed: int = 7
    c3: float = None  # optional transversal constant; rescaled = c3 * y * n^{-2/3}

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.c3 is not None and not self.c3 > 0:
            raise ValueError(f"c3 must be positive, got {self.c3}")


@dataclass(frozen=True, eq=False)
class LppBatch:
    config: LppConfig
    endpoints_y: np.ndarray
    rescaled: np.ndarray


def _generator(seed, index):
    return np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))


@numba.njit(nogil=True, cache=True)
def _geom(u, inv_log1mq):
    # inversion with U = 1 - u on (0, 1]: w = floor(log U / log(1 - q));
    # 1 - u is exact for 53-bit uniforms, so log beats log1p here
    return np.int64(math.floor(math.log(1.0 - u) * inv_log1mq))


@numba.njit(nogil=True, cache=True)
def _geometric_array(u, inv_log1mq):
    out = np.empty(u.size, dtype=np.int64)
    for i in range(u.size):
        out[i] = _geom(u[i], inv_log1mq)
    return out


def _geometric(u, q):
    return _geometric_array(np.ascontiguousarray(u, dtype=np.float64), 1.0 / math.log1p(-q))


def draw_weights(cfg, index):
    """Weight field of sample ``index`` as a (2n+1, 2n+1) array.

    Entries with ``i + j > 2n`` are zero and never read.  The draw order
    (anti-diagonal d = 0..2n, then i = 0..d) matches ``sample_endpoints``.
    """
    n2 = 2 * cfg.n
    rng = _generator(cfg.seed, index)
    w = np.zeros((n2 + 1, n2 + 1), dtype=np.int64)
    for d0 in range(0, n2 + 1, _DIAG_BLOCK):
        d1 = min(d0 + _DIAG_BLOCK, n2 + 1)
        vals = _geometric(rng.random((d1 - d0) * (d0 + d1 + 1) // 2), cfg.q)
        k = 0
        for d in range(d0, d1):
            i = np.arange(d + 1)
            w[i, d - i] = vals[k : k + d + 1]
            k += d + 1
    return w


def last_passage_profile(weights):
    """Passage times L(n + y, n - y) for y = -n..n.

    ``weights`` is a square (2n+1, 2n+1) array of non-negative integers;
    only entries with ``i + j <= 2n`` are used.
    """
    w = np.asarray(weights)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 != 1:
        raise ValueError(f"weights must be a (2n+1, 2n+1) array, got shape {w.shape}")
    if not np.issubdtype(w.dtype, np.integer):
        raise ValueError("weights must be integers")
    n2 = w.shape[0] - 1
    ii, jj = np.indices(w.shape)
    if np.any(w[ii + jj <= n2] < 0):
        raise ValueError("weights must be non-negative")
    g = np.array([w[0, 0]], dtype=np.int64)
    for d in range(1, n2 + 1):
        i = np.arange(d + 1)
        best = np.empty(d + 1, dtype=np.int64)
        best[0] = g[0]
        best[d] = g[d - 1]
        best[1:d] = np.maximum(g[:-1], g[1:])
        g = w[i, d - i] + best
    return g


@numba.njit(nogil=True, cache=True)
def _advance(g, u, d0, d1, inv_log1mq):
    # anti-diagonals d0..d1-1 in place; g[i] holds G(i, d - i)
    k = 0
    for d in range(d0, d1):
        if d == 0:
            g[0] = _geom(u[0], inv_log1mq)
            k += 1
            continue
        # descending i so g[i - 1] is still the previous diagonal
        for i in range(d, -1, -1):
            w = _geom(u[k + i], inv_log1mq)
            if i == d:
                best = g[i - 1]
            elif i == 0:
                best = g[0]
            else:
                best = g[i - 1] if g[i - 1] > g[i] else g[i]
            g[i] = w + best
        k += d + 1


@numba.njit(nogil=True, cache=True)
def _argmax_y(g, n):
    # ties: smallest |y| first, then negative y
    best = -1
    by = 0
    for i in range(2 * n + 1):
        y = i - n
        v = g[i]
        if best < 0 or v > g[best]:
            best = i
            by = y
        elif v == g[best]:
            if abs(y) < abs(by) or (abs(y) == abs(by) and y < by):
                best = i
                by = y
    return by


def sample_profile(cfg, index):
    """Final anti-diagonal profile of sample ``index`` via the fast kernel."""
    n2 = 2 * cfg.n
    rng = _generator(cfg.seed, index)
    g = np.zeros(n2 + 1, dtype=np.int64)
    inv = 1.0 / math.log1p(-cfg.q)
    for d0 in range(0, n2 + 1, _DIAG_BLOCK):
        d1 = min(d0 + _DIAG_BLOCK, n2 + 1)
        _advance(g, rng.random((d1 - d0) * (d0 + d1 + 1) // 2), d0, d1, inv)
    return g


def sample_endpoints(cfg, threads=None, progress=None):
    """Draw ``cfg.samples`` endpoint locations."""
    idx = np.arange(cfg.samples)
    ys = np.empty(cfg.samples, dtype=np.int64)

    def work(chunk):
        for i in chunk:
            ys[i] = _argmax_y(sample_profile(cfg, i), cfg.n)
        if progress is not None:
            progress(len(chunk))

    chunks = np.array_split(idx, max(1, min(cfg.samples, 64 * (threads or 1))))
    if threads is None or threads <= 1:
        for c in chunks:
            work(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    scale = cfg.n ** (-2.0 / 3.0) * (cfg.c3 if cfg.c3 is not None else 1.0)
    return LppBatch(cfg, ys, ys * scale)


def excess_kurtosis(x):
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    m2 = np.mean(d**2)
    if not m2 > 0:
        raise DataError("sample has zero variance")
    return float(np.mean(d**4) / m2**2 - 3.0)


def standardized_reference_cdf(reference):
    """CDF of the reference density after centering and scaling to unit variance."""
    t = np.asarray(reference.t_grid, dtype=float)
    f = np.asarray(reference.values, dtype=float)
    mom = moments(reference)
    z = (t - mom.mean) / math.sqrt(mom.variance)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(t))])
    cum /= cum[-1]

    def cdf(x):
        return np.interp(x, z, cum, left=0.0, right=1.0)

    return cdf


def ks_distance(batch, reference):
    """Kolmogorov-Smirnov distance between standardized samples and reference."""
    x = np.asarray(batch.rescaled if hasattr(batch, "rescaled") else batch, dtype=float)
    sd = x.std()
    if x.size < 2 or not sd > 0:
        raise DataError("batch is degenerate (zero variance)")
    z = (x - x.mean()) / sd
    return float(sps.kstest(z, standardized_reference_cdf(reference)).statistic)
