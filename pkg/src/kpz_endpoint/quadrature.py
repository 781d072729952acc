"""Gauss-Legendre rules on finite intervals, plain and composite."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EvaluationError

MAX_NODES = 2048


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.nodes.size


@lru_cache(maxsize=64)
def _reference_rule(n):
    """n-point Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration."""
    k = np.arange(1, n + 1)
    # Chebyshev-angle initial guess, descending in x
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        # P_n' from P_n and P_{n-1}
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1].copy()
    w = w[::-1].copy()
    # enforce exact antisymmetry of the nodes
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    """n-point Gauss-Legendre rule on [a, b]."""
    if int(n) != n or n < 1 or n > MAX_NODES:
        raise ValueError(f"gauss_legendre: need 1 <= n <= {MAX_NODES}, got {n}")
    if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
        raise ValueError(f"gauss_legendre: invalid interval [{a}, {b}]")
    x, w = _reference_rule(int(n))
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return QuadratureRule(mid + half * x, half * w, (float(a), float(b)))


def composite_gauss_legendre(n, a, b, panels):
    """``panels`` equal panels on [a, b], each with an n-point rule."""
    if int(panels) != panels or panels < 1:
        raise ValueError(f"composite_gauss_legendre: panels must be >= 1, got {panels}")
    edges = np.linspace(a, b, int(panels) + 1)
    parts = [gauss_legendre(n, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return QuadratureRule(
        np.concatenate([p.nodes for p in parts]),
        np.concatenate([p.weights for p in parts]),
        (float(a), float(b)),
    )


def integrate(rule, f):
    """Sum of ``w_i f(x_i)``; ``f`` is called once on the node array."""
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            f"integrand is {values[i]} at node x[{i}] = {float(rule.nodes[i])!r}"
        )
    return float(rule.weights @ values)
