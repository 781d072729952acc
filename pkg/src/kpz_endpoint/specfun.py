"""Airy function Ai and its derivative on the real line.

Evaluation is split in three zones:

* ``|x| <= 12``: Taylor expansion of the Airy ODE ``y'' = x y`` about the
  nearest anchor on a 1/8-spaced grid.  Anchor values come from the
  Maclaurin series summed in 70-digit decimal arithmetic, so the
  cancellation that ruins the double-precision series for ``|x| > 2`` never
  reaches the returned floats.
* ``x > 12``: exponentially small asymptotic expansion in
  ``zeta = (2/3) x**1.5``.
* ``x < -12``: oscillatory asymptotic expansion.

All entry points accept scalars or numpy arrays.
"""

from decimal import Decimal, localcontext
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError

# Gamma(1/3) and pi to 70 digits.
_GAMMA_THIRD = Decimal(
    "2.678938534707747633655692940974677644128689377957301100950428327590417610"
)
_PI = Decimal(
    "3.141592653589793238462643383279502884197169399375105820974944592307816406"
)
_PREC = 70

ANCHOR_STEP = 0.125
TAYLOR_LIMIT = 12.0
_N_ANCHOR = int(round(TAYLOR_LIMIT / ANCHOR_STEP))
_TAYLOR_TERMS = 22
_ASYMPTOTIC_TERMS = 24
# exp(-zeta) below 1e-300 is flushed to exact zero.
_UNDERFLOW_ZETA = 300.0 * np.log(10.0)


class AiryValue(NamedTuple):
    ai: float
    aip: float


def _maclaurin_decimal(x):
    """Ai(x), Ai'(x) from the two Maclaurin series, in decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = _PREC
        three = Decimal(3)
        c1 = three ** (Decimal(-1) / 6) * _GAMMA_THIRD / (2 * _PI)  # Ai(0)
        c2 = three ** (Decimal(-1) / 3) / _GAMMA_THIRD  # -Ai'(0)
        x = Decimal(x)
        tiny = Decimal(10) ** (-_PREC - 5)

        # f = sum x^{3k} / [(2*3)(5*6)...((3k-1)(3k))], g likewise with x^{3k+1}
        f, fp = Decimal(1), Decimal(0)
        g, gp = x, Decimal(1)
        a, b = Decimal(1), x  # current f and g terms
        ap, bp = Decimal(0), Decimal(1)  # current f' and g' terms
        k = 0
        while True:
            k += 1
            # f' term k is x^{3k-1} / [prod_{j<k}(3j-1)(3j) * (3k-1)]
            ap = a * x * x / (3 * k - 1)
            a = ap * x / (3 * k)
            bp = b * x * x / (3 * k)
            b = bp * x / (3 * k + 1)
            f += a
            fp += ap
            g += b
            gp += bp
            scale = abs(f) + abs(g) + 1
            if max(abs(a), abs(ap), abs(b), abs(bp)) < tiny * scale and k > 3:
                break
        return c1 * f - c2 * g, c1 * fp - c2 * gp


@lru_cache(maxsize=1)
def _anchors():
    """Anchor table (x0, Ai(x0), Ai'(x0)) on [-12, 12] with step 1/8."""
    xs = np.arange(-_N_ANCHOR, _N_ANCHOR + 1) * ANCHOR_STEP
    ai = np.empty_like(xs)
    aip = np.empty_like(xs)
    for i, k in enumerate(range(-_N_ANCHOR, _N_ANCHOR + 1)):
        v, d = _maclaurin_decimal(Decimal(k) / 8)
        ai[i] = float(v)
        aip[i] = float(d)
    return xs, ai, aip


def _taylor(x):
    xs, a_tab, d_tab = _anchors()
    idx = np.rint(x / ANCHOR_STEP).astype(np.int64) + _N_ANCHOR
    x0 = xs[idx]
    h = x - x0
    # Taylor coefficients of y about x0: c[k+2] = (x0 c[k] + c[k-1]) / ((k+2)(k+1))
    c_prev = np.zeros_like(x)
    c0 = a_tab[idx]
    c1 = d_tab[idx]
    val = c0 + c1 * h
    der = c1.copy()
    cm1, ck, ck1 = c_prev, c0, c1
    hp = h.copy()  # h^(k+1) for the term being added, starting at k+2 = 2
    for k in range(0, _TAYLOR_TERMS):
        c_new = (x0 * ck + cm1) / ((k + 2) * (k + 1))
        der = der + (k + 2) * c_new * hp
        hp = hp * h
        val = val + c_new * hp
        cm1, ck, ck1 = ck, ck1, c_new
    return val, der


@lru_cache(maxsize=1)
def _asymptotic_coeffs():
    u = [1.0]
    for k in range(1, _ASYMPTOTIC_TERMS):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    u = np.array(u)
    k = np.arange(_ASYMPTOTIC_TERMS)
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


def _asymptotic_positive(x):
    u, v = _asymptotic_coeffs()
    # zeta ~ 600 near the underflow edge; extended precision keeps exp(-zeta) at ~1 ulp
    xl = x.astype(np.longdouble)
    zeta_l = 2 * xl * np.sqrt(xl) / 3
    zeta = zeta_l.astype(float)
    sign = (-1.0) ** np.arange(u.size)
    inv = 1.0 / zeta
    su = np.zeros_like(x)
    sv = np.zeros_like(x)
    for k in range(u.size - 1, -1, -1):
        su = su * inv + sign[k] * u[k]
        sv = sv * inv + sign[k] * v[k]
    q = x**0.25
    with np.errstate(under="ignore"):
        e = np.exp(-zeta_l).astype(float)
    ai = e / (2.0 * np.sqrt(np.pi) * q) * su
    aip = -q * e / (2.0 * np.sqrt(np.pi)) * sv
    dead = zeta > _UNDERFLOW_ZETA
    ai[dead] = 0.0
    aip[dead] = 0.0
    return ai, aip


def _asymptotic_negative(x):
    u, v = _asymptotic_coeffs()
    z = -x
    zl = z.astype(np.longdouble)
    zeta_l = 2 * zl * np.sqrt(zl) / 3
    zeta = zeta_l.astype(float)
    inv2 = 1.0 / (zeta * zeta)
    n_even = (u.size + 1) // 2
    n_odd = u.size // 2
    pe = np.zeros_like(z)
    po = np.zeros_like(z)
    re = np.zeros_like(z)
    ro = np.zeros_like(z)
    # sum_k (-1)^k c_{2k} zeta^{-2k} and sum_k (-1)^k c_{2k+1} zeta^{-2k-1}
    for k in range(n_even - 1, -1, -1):
        pe = pe * inv2 + (-1.0) ** k * u[2 * k]
        re = re * inv2 + (-1.0) ** k * v[2 * k]
    for k in range(n_odd - 1, -1, -1):
        po = po * inv2 + (-1.0) ** k * u[2 * k + 1]
        ro = ro * inv2 + (-1.0) ** k * v[2 * k + 1]
    po = po / zeta
    ro = ro / zeta
    phase = zeta_l - np.longdouble(np.pi) / 4
    c, s = np.cos(phase).astype(float), np.sin(phase).astype(float)
    q = z**0.25
    ai = (c * pe + s * po) / (np.sqrt(np.pi) * q)
    aip = q / np.sqrt(np.pi) * (s * re - c * ro)
    return ai, aip


def airy(x):
    """Return ``AiryValue(ai, aip)`` for scalar or array ``x``.

    Raises DomainError for non-finite input.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"airy: non-finite argument {x!r}")
    flat = np.atleast_1d(arr).ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)

    mid = np.abs(flat) <= TAYLOR_LIMIT
    pos = flat > TAYLOR_LIMIT
    neg = flat < -TAYLOR_LIMIT
    if mid.any():
        ai[mid], aip[mid] = _taylor(flat[mid])
    if pos.any():
        ai[pos], aip[pos] = _asymptotic_positive(flat[pos])
    if neg.any():
        ai[neg], aip[neg] = _asymptotic_negative(flat[neg])

    if arr.ndim == 0:
        return AiryValue(float(ai[0]), float(aip[0]))
    return AiryValue(ai.reshape(arr.shape), aip.reshape(arr.shape))


def airy_ai(x):
    return airy(x).ai


def airy_aip(x):
    return airy(x).aip
