"""Joint density of the location and height of the maximum of Airy2(t) - t^2.

With ``s = 4**(1/3) m`` the joint density is

    f(t, m) = F_GOE(s) * gamma(t, s)
            = det(I - B_s + Psi_{t,m}) - F_GOE(s)

on L^2([0, inf)), where ``B_s(x, y) = Ai(x + y + s)``, ``F_GOE(s) = det(I - B_s)``,
``gamma`` is a resolvent quadratic form in the functions ``psi_{+-t,m}`` and
``Psi_{t,m}`` is the rank-one kernel built from the same functions.  The
half-line is truncated to [0, L] with L chosen by an explicit decay envelope.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fredholm
from .quadrature import composite_gauss_legendre, gauss_legendre
from .specfun import airy

CBRT2 = 2.0 ** (1.0 / 3.0)
CBRT4 = 4.0 ** (1.0 / 3.0)
_MAX_CUTOFF = 1024.0


@dataclass(frozen=True)
class NumericsConfig:
    nodes: int = 80
    cutoff_floor: float = 12.0
    envelope_tol: float = 1e-14
    m_lo: float = -6.0
    m_hi: float = 3.0
    t_max: float = 4.0
    dm: float = 0.02
    dt: float = 0.02

    def __post_init__(self):
        if int(self.nodes) != self.nodes or self.nodes < 25:
            raise ValueError(f"nodes must be an integer >= 25, got {self.nodes}")
        if not self.cutoff_floor >= 8:
            raise ValueError(f"cutoff_floor must be >= 8, got {self.cutoff_floor}")
        if not 0 < self.envelope_tol < 1:
            raise ValueError(f"envelope_tol must lie in (0, 1), got {self.envelope_tol}")
        if not self.m_lo < self.m_hi:
            raise ValueError(f"need m_lo < m_hi, got [{self.m_lo}, {self.m_hi}]")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if not (self.dm > 0 and self.dt > 0):
            raise ValueError("grid steps must be positive")

    def t_grid(self):
        return symmetric_grid(self.t_max, self.dt)

    def m_grid(self):
        k = int(round((self.m_hi - self.m_lo) / self.dm))
        return self.m_lo + self.dm * np.arange(k + 1)


@dataclass(frozen=True, eq=False)
class JointDensityTable:
    t_grid: np.ndarray
    m_grid: np.ndarray
    values: np.ndarray  # values[i, j] = f(t_i, m_j)
    config: NumericsConfig = field(default_factory=NumericsConfig)


@dataclass(frozen=True, eq=False)
class EndpointTable:
    t_grid: np.ndarray
    values: np.ndarray
    config: NumericsConfig = field(default_factory=NumericsConfig)


def symmetric_grid(half_width, step):
    """Grid k*step for |k| <= half_width/step, exactly symmetric about 0."""
    k = int(round(half_width / step))
    pos = step * np.arange(1, k + 1)
    return np.concatenate([-pos[::-1], [0.0], pos])


def cutoff(s, t, cfg):
    """Truncation point L for the half-line [0, inf) at parameters (s, t).

    Doubles L from ``cutoff_floor`` until the decay envelope
    ``2 exp(2^{1/3} L |t|) exp(-(2/3) max(0, 2^{1/3} L + min(s, s + t^2))^{3/2})``
    drops below ``envelope_tol``.
    """
    log_tol = math.log(cfg.envelope_tol)
    shift = min(s, s + t * t)
    L = float(cfg.cutoff_floor)
    while L < _MAX_CUTOFF:
        z = max(0.0, CBRT2 * L + shift)
        log_env = math.log(2.0) + CBRT2 * L * abs(t) - 2.0 / 3.0 * z**1.5
        if log_env <= log_tol:
            break
        L *= 2.0
    return L


@lru_cache(maxsize=32)
def _rule(n, L):
    return gauss_legendre(n, 0.0, L)


def b_kernel(s):
    """Kernel (x, y) -> Ai(x + y + s)."""

    def kernel(x, y):
        return airy(x + y + s).ai

    return kernel


def db_kernel(s):
    """s-derivative of ``b_kernel(s)``: (x, y) -> Ai'(x + y + s)."""

    def kernel(x, y):
        return airy(x + y + s).aip

    return kernel


@lru_cache(maxsize=256)
def _b_operator(s, n, L):
    return fredholm.discretize(b_kernel(s), _rule(n, L))


def b_operator(s, cfg, t=0.0):
    """Discretized B_s on [0, L(s, t)]."""
    return _b_operator(float(s), int(cfg.nodes), cutoff(s, t, cfg))


def f_goe(s, cfg=None):
    """F_GOE(s) = det(I - B_s) on L^2([0, inf))."""
    cfg = cfg or NumericsConfig()
    return fredholm.det_id_minus(b_operator(s, cfg))


def cdf_max(m, cfg=None):
    """P(max_t {Airy2(t) - t^2} <= m) = F_GOE(4^{1/3} m)."""
    return f_goe(CBRT4 * m, cfg)


def f_goe_derivative(s, cfg=None):
    """F_GOE'(s) from the trace formula -det(I - B) tr((I - B)^{-1} dB/ds)."""
    cfg = cfg or NumericsConfig()
    op = b_operator(s, cfg)
    dop = fredholm.discretize(db_kernel(s), op.rule)
    return fredholm.det_derivative(op, dop)


def psi(t, m, x):
    """psi_{t,m}(x) = 2 e^{xt} [t Ai(x + m + t^2) + Ai'(x + m + t^2)].

    Broadcasts over array arguments.
    """
    t, m, x = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, m, x)))
    z = x + m + t * t
    a = airy(z)
    # split exp(xt) in halves so the growing factor never overflows before
    # meeting the decaying Airy factor; past the point where the Airy decay
    # wins by more than e^-700 the value is zero
    dead = (z > 0) & (x * t - 2.0 / 3.0 * np.maximum(z, 0.0) ** 1.5 < -700.0)
    with np.errstate(over="ignore", invalid="ignore"):
        half = np.exp(0.5 * np.where(dead, 0.0, x * t))
        out = np.where(dead, 0.0, 2.0 * half * ((t * a.ai + a.aip) * half))
    return float(out) if out.ndim == 0 else out


def _row(m, ts, cfg, determinant=False):
    """f(t, m) for all t in ``ts`` at fixed m (one factorization per cutoff)."""
    ts = np.asarray(ts, dtype=float)
    s = CBRT4 * m
    out = np.empty(ts.shape)
    cuts = np.array([cutoff(s, t, cfg) for t in ts])
    for L in np.unique(cuts):
        sel = cuts == L
        op = _b_operator(float(s), int(cfg.nodes), float(L))
        rule = op.rule
        xs = CBRT2 * rule.nodes[:, None]
        sw = np.sqrt(rule.weights)[:, None]
        tt = ts[sel][None, :]
        u = sw * psi(tt, m, xs)  # psi_{t,m}(2^{1/3} y)
        v = sw * psi(-tt, m, xs)  # psi_{-t,m}(2^{1/3} x)
        if determinant:
            vals = []
            for k in range(u.shape[1]):
                uk = fredholm.WeightedVector(rule, CBRT2 * u[:, k])
                vk = fredholm.WeightedVector(rule, v[:, k].copy())
                vals.append(fredholm.rank_one_det(op, uk, vk) - op.det)
            out[sel] = vals
        else:
            # unguarded: for m near -6, det(I - B) ~ 1e-19 yet the product
            # det * gamma keeps ~5 significant digits
            gam = CBRT2 * np.einsum("ik,ik->k", v, op.solve(u, guard=False))
            out[sel] = gam * op.det
    return out


def gamma(t, s, cfg=None):
    """Resolvent quadratic form gamma(t, s) with psi parameter 4^{-1/3} s."""
    cfg = cfg or NumericsConfig()
    m = s / CBRT4
    L = cutoff(s, t, cfg)
    op = _b_operator(float(s), int(cfg.nodes), L)
    u = fredholm.weighted(lambda y: psi(t, m, CBRT2 * y), op.rule)
    v = fredholm.weighted(lambda x: psi(-t, m, CBRT2 * x), op.rule)
    return CBRT2 * fredholm.resolvent_quadform(op, u, v)


def joint_density(t, m, cfg=None, method="resolvent"):
    """Joint density f(t, m) of the argmax and the max.

    ``method="resolvent"`` evaluates gamma * F_GOE; ``method="determinant"``
    evaluates the rank-one-updated determinant minus F_GOE.
    """
    cfg = cfg or NumericsConfig()
    if method not in ("resolvent", "determinant"):
        raise ValueError(f"unknown method {method!r}")
    return float(_row(m, [t], cfg, determinant=method == "determinant")[0])


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def joint_table(t_grid=None, m_grid=None, cfg=None, threads=None):
    """Fill f(t_i, m_j) on a grid; rows in m are independent work items."""
    cfg = cfg or NumericsConfig()
    t_grid = cfg.t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    m_grid = cfg.m_grid() if m_grid is None else np.asarray(m_grid, dtype=float)
    cols = _map(lambda m: _row(float(m), t_grid, cfg), m_grid, threads)
    values = np.column_stack(cols) if cols else np.empty((t_grid.size, 0))
    return JointDensityTable(t_grid, m_grid, values, cfg)


def _m_rule(cfg):
    # >= 200 nodes: 12 panels of 20
    return composite_gauss_legendre(20, cfg.m_lo, cfg.m_hi, 12)


def endpoint_table(t_grid=None, cfg=None, threads=None):
    """f_end(t) = int dm f(t, m) by composite Gauss-Legendre in m."""
    cfg = cfg or NumericsConfig()
    t_grid = cfg.t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    rule = _m_rule(cfg)
    rows = _map(lambda m: _row(float(m), t_grid, cfg), rule.nodes, threads)
    values = np.asarray(rule.weights) @ np.vstack(rows)
    return EndpointTable(t_grid, values, cfg)


def endpoint_density(t, cfg=None):
    cfg = cfg or NumericsConfig()
    if abs(t) > cfg.t_max + 2:
        raise ValueError(f"|t| = {abs(t)} exceeds t_max + 2 = {cfg.t_max + 2}")
    return float(endpoint_table([t], cfg).values[0])


def goe_marginal_residual(m, cfg=None):
    """(int dt f(t, m), 4^{1/3} F_GOE'(4^{1/3} m)) for the marginal identity."""
    cfg = cfg or NumericsConfig()
    rule = composite_gauss_legendre(20, -cfg.t_max, cfg.t_max, 20)
    lhs = float(rule.weights @ _row(m, rule.nodes, cfg))
    rhs = CBRT4 * f_goe_derivative(CBRT4 * m, cfg)
    return lhs, rhs


def psi_t_integral(x, y, m):
    """int dt psi_{-t,m}(2^{1/3} x) psi_{t,m}(2^{1/3} y) over t in [-8, 8]."""
    rule = composite_gauss_legendre(20, -8.0, 8.0, 20)
    t = rule.nodes
    return float(rule.weights @ (psi(-t, m, CBRT2 * x) * psi(t, m, CBRT2 * y)))


def psi_closed_form(x, y, m):
    """-2^{1/3} Ai'(x + y + 4^{1/3} m)."""
    return -CBRT2 * airy(x + y + CBRT4 * m).aip


def psi_closed_form_residual(x, y, m):
    return abs(psi_t_integral(x, y, m) - psi_closed_form(x, y, m))
