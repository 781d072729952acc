"""Invariant checks over the density and stats layers.

Each check reduces to a residual compared against a tolerance; a check passes
when ``residual < tolerance``.  Boolean properties are encoded as signed
residuals with tolerance 0 (e.g. ``quad_r2 - cubic_r2`` must be negative).
"""

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import density as dens
from . import stats
from .errors import NumericsError

REFERENCE_VARIANCE = 0.2409
REFERENCE_EXCESS_KURTOSIS = -0.2374

PROBE_T = np.linspace(-2.0, 2.0, 9)
PROBE_M = np.linspace(-3.0, 1.0, 9)
PSI_PROBES = [
    (0.0, 0.0, 0.0), (1.0, 0.5, -1.0), (0.5, 1.0, -1.0),
    (0.0, 0.0, -2.0), (2.0, 0.0, 0.5), (0.3, 0.7, 1.0),
    (1.5, 1.5, -0.5), (0.0, 3.0, -3.0), (2.5, 0.1, 0.0),
]


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<28s} residual={self.residual: .3e}  tol={self.tolerance:.1e}"


def marginal_identity(cfg, ms=(-2.0, -1.0, 0.0, 1.0)):
    res = []
    for m in ms:
        lhs, rhs = dens.goe_marginal_residual(m, cfg)
        res.append(abs(lhs - rhs))
    return Check("goe_marginal_identity", max(res), 1e-6)


def derivative_fd(cfg, ss=(-2.0, 0.0, 2.0), h=1e-4):
    res = []
    for s in ss:
        trace = dens.f_goe_derivative(s, cfg)
        fd = (dens.f_goe(s + h, cfg) - dens.f_goe(s - h, cfg)) / (2 * h)
        res.append(abs(trace - fd))
    return Check("fgoe_derivative_vs_fd", max(res), 1e-7)


def two_formula(cfg):
    diff = 0.0
    for t, m in itertools.product(PROBE_T, PROBE_M):
        a = dens.joint_density(t, m, cfg, "resolvent")
        b = dens.joint_density(t, m, cfg, "determinant")
        diff = max(diff, abs(a - b))
    return Check("two_formula_agreement", diff, 1e-8)


def joint_symmetry(cfg):
    tab = dens.joint_table(PROBE_T, PROBE_M, cfg)
    return Check("joint_symmetry", float(np.max(np.abs(tab.values - tab.values[::-1]))), 1e-9)


def psi_identity():
    res = max(dens.psi_closed_form_residual(*p) for p in PSI_PROBES)
    return Check("psi_closed_form", res, 1e-6)


def fgoe_monotone(cfg):
    vals = np.array([dens.f_goe(s, cfg) for s in range(-4, 4)])
    return Check("fgoe_monotone", float(np.max(vals[:-1] - vals[1:])), 0.0)


def endpoint_checks(table):
    mom = stats.moments(table)
    fit = stats.tail_fit(table)
    f = table.values
    return [
        Check("total_mass", abs(mom.mass - 1.0), 1e-4),
        Check("endpoint_symmetry", float(np.max(np.abs(f - f[::-1]))), 1e-8),
        Check("endpoint_variance", abs(mom.variance - REFERENCE_VARIANCE), 5e-3),
        Check("endpoint_excess_kurtosis", abs(mom.excess_kurtosis - REFERENCE_EXCESS_KURTOSIS), 5e-3),
        Check("tail_cubic_beats_quadratic", fit.quad_r2 - fit.cubic_r2, 0.0),
        Check("tail_c_positive", -fit.c, 0.0),
    ]


def node_doubling(cfg, ss=np.linspace(-4.0, 3.0, 15)):
    lo = replace(cfg, nodes=80)
    hi = replace(cfg, nodes=160)
    diff = max(abs(dens.f_goe(s, lo) - dens.f_goe(s, hi)) for s in ss)
    return Check("node_doubling_fgoe", diff, 1e-9)


def cutoff_doubling(cfg, t=0.0, m=-1.0):
    a = dens.joint_density(t, m, cfg)
    b = dens.joint_density(t, m, replace(cfg, cutoff_floor=2 * cfg.cutoff_floor))
    return Check("cutoff_doubling_f", abs(a - b), 1e-9)


def _guarded(name, fn, *args):
    # a check that cannot even be evaluated counts as failed
    try:
        return fn(*args)
    except (NumericsError, ValueError, FloatingPointError) as exc:
        return Check(f"{name} ({type(exc).__name__})", float("inf"), 0.0)


def run(level="fast", cfg=None, threads=None, table=None, echo=None):
    """Run the suite; returns the list of checks.  ``echo`` gets each line."""
    if level not in ("fast", "full"):
        raise ValueError(f"unknown level {level!r}")
    cfg = cfg or dens.NumericsConfig(nodes=80 if level == "fast" else 160)
    checks = []

    def add(result):
        for c in result if isinstance(result, list) else [result]:
            checks.append(c)
            if echo is not None:
                echo(c.line())

    add(_guarded("goe_marginal_identity", marginal_identity, cfg))
    add(_guarded("fgoe_derivative_vs_fd", derivative_fd, cfg))
    add(_guarded("two_formula_agreement", two_formula, cfg))
    add(_guarded("joint_symmetry", joint_symmetry, cfg))
    add(_guarded("psi_closed_form", psi_identity))
    add(_guarded("fgoe_monotone", fgoe_monotone, cfg))
    table = table or _guarded("endpoint_table", dens.endpoint_table, None, cfg, threads)
    if isinstance(table, Check):
        add(table)
    else:
        add(_guarded("endpoint_statistics", endpoint_checks, table))
    if level == "full":
        add(_guarded("node_doubling_fgoe", node_doubling, cfg))
        add(_guarded("cutoff_doubling_f", cutoff_doubling, cfg))
    return checks
