"""Moments and tail fits of tabulated endpoint densities.

Everything is computed with the trapezoid rule on the table's own grid, so
the numbers describe exactly what gets written to disk.
"""

from typing import NamedTuple

import numpy as np

from .errors import RangeError


class MomentSummary(NamedTuple):
    mass: float
    mean: float
    variance: float
    excess_kurtosis: float
    skewness: float = 0.0


class TailFit(NamedTuple):
    c: float
    cubic_r2: float
    quad_r2: float


def moments(table):
    t = np.asarray(table.t_grid, dtype=float)
    f = np.asarray(table.values, dtype=float)
    if t.size < 2:
        raise ValueError("moments: table needs at least two grid points")
    mass = float(np.trapezoid(f, t))
    if not mass > 0:
        raise ValueError(f"moments: non-positive mass {mass}")
    p = f / mass
    mean = float(np.trapezoid(t * p, t))
    d = t - mean
    mu2 = float(np.trapezoid(d**2 * p, t))
    mu3 = float(np.trapezoid(d**3 * p, t))
    mu4 = float(np.trapezoid(d**4 * p, t))
    return MomentSummary(mass, mean, mu2, mu4 / mu2**2 - 3.0, mu3 / mu2**1.5)


def _r2(y, yhat):
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


def tail_fit(table, t_lo=2.5, t_hi=3.8):
    """Fit log f_end = a - c t^3 on [t_lo, t_hi]; compare with a - c' t^2."""
    t = np.asarray(table.t_grid, dtype=float)
    f = np.asarray(table.values, dtype=float)
    sel = (t >= t_lo - 1e-12) & (t <= t_hi + 1e-12)
    if sel.sum() < 3:
        raise RangeError(f"tail_fit: fewer than 3 grid points in [{t_lo}, {t_hi}]")
    if np.any(f[sel] <= 0):
        raise RangeError(f"tail_fit: non-positive density in [{t_lo}, {t_hi}]")
    x, y = t[sel], np.log(f[sel])

    def fit(power):
        a = np.column_stack([np.ones_like(x), -(x**power)])
        coef, *_ = np.linalg.lstsq(a, y, rcond=None)
        return coef, _r2(y, a @ coef)

    (_, c), r2_cubic = fit(3)
    _, r2_quad = fit(2)
    return TailFit(float(c), r2_cubic, r2_quad)
