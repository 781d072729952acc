"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are written past pytest's capture either way.
"""

import os
import time
from dataclasses import replace

import numpy as np
import pytest

from kpz_endpoint import density as dens
from kpz_endpoint import lppsim, stats, verification

THREADS = os.cpu_count() or 1


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail, seconds, budget):
        within = seconds < budget
        flag = "PASS" if ok and within else "FAIL"
        with capsys.disabled():
            print(f"\n{flag}  criterion {number}: {title}  {detail}  [{seconds:.1f}s / {budget:.0f}s]")
        assert ok, detail
        assert within, f"runtime {seconds:.1f}s exceeds {budget}s"

    return emit


@pytest.fixture(scope="module")
def timed_endpoint():
    t0 = time.perf_counter()
    table = dens.endpoint_table(cfg=dens.NumericsConfig(), threads=THREADS)
    return table, time.perf_counter() - t0


@pytest.fixture(scope="module")
def timed_joint():
    cfg = dens.NumericsConfig()
    t0 = time.perf_counter()
    table = dens.joint_table(cfg.t_grid(), cfg.m_grid(), cfg, threads=THREADS)
    return table, time.perf_counter() - t0


def test_criterion_1_marginal_identity(report):
    cfg = dens.NumericsConfig(nodes=80)
    t0 = time.perf_counter()
    res = []
    for m in (-2.0, -1.0, 0.0, 1.0):
        lhs, rhs = dens.goe_marginal_residual(m, cfg)
        res.append(abs(lhs - rhs))
    worst = max(res)
    report(1, "GOE marginal identity", worst < 1e-6, f"max|lhs-rhs|={worst:.2e} (tol 1e-6)",
           time.perf_counter() - t0, 120)


def test_criterion_2_total_mass(report, timed_joint):
    table, seconds = timed_joint
    assert table.values.shape == (401, 451)
    inner = np.trapezoid(table.values, table.m_grid, axis=1)
    mass = float(np.trapezoid(inner, table.t_grid))
    err = abs(mass - 1.0)
    report(2, "total mass", err < 1e-4, f"mass={mass:.8f} |mass-1|={err:.2e} (tol 1e-4)",
           seconds, 600)


def test_criterion_3_two_formula_agreement(report):
    t0 = time.perf_counter()
    c = verification.two_formula(dens.NumericsConfig())
    assert len(verification.PROBE_T) == len(verification.PROBE_M) == 9
    report(3, "two-formula agreement", c.passed, f"max diff={c.residual:.2e} (tol 1e-8)",
           time.perf_counter() - t0, 60)


def test_criterion_4_endpoint_statistics(report, timed_endpoint):
    table, build = timed_endpoint
    t0 = time.perf_counter()
    mom = stats.moments(table)
    dv, dk = abs(mom.variance - 0.2409), abs(mom.excess_kurtosis + 0.2374)
    report(4, "endpoint variance and kurtosis", dv < 5e-3 and dk < 5e-3,
           f"variance={mom.variance:.5f} kurtosis={mom.excess_kurtosis:.5f} (tol 5e-3)",
           build + time.perf_counter() - t0, 600)


def test_criterion_5_symmetry(report, timed_joint, timed_endpoint):
    t0 = time.perf_counter()
    joint, end = timed_joint[0].values, timed_endpoint[0].values
    a = float(np.max(np.abs(joint - joint[::-1])))
    b = float(np.max(np.abs(end - end[::-1])))
    report(5, "symmetry in t", a < 1e-9 and b < 1e-8,
           f"joint={a:.2e} (tol 1e-9) endpoint={b:.2e} (tol 1e-8)", time.perf_counter() - t0, 5)


def test_criterion_6_psi_closed_form(report):
    t0 = time.perf_counter()
    c = verification.psi_identity()
    assert len(verification.PSI_PROBES) == 9
    report(6, "closed-form Psi identity", c.passed, f"max residual={c.residual:.2e} (tol 1e-6)",
           time.perf_counter() - t0, 10)


def test_criterion_7_tail(report, timed_endpoint):
    t0 = time.perf_counter()
    fit = stats.tail_fit(timed_endpoint[0], 2.5, 3.8)
    report(7, "cubic tail", fit.cubic_r2 > fit.quad_r2 and fit.c > 0,
           f"c={fit.c:.4f} cubic_r2={fit.cubic_r2:.6f} quad_r2={fit.quad_r2:.6f}",
           time.perf_counter() - t0, 5)


def test_criterion_8_self_convergence(report):
    t0 = time.perf_counter()
    lo, hi = dens.NumericsConfig(nodes=80), dens.NumericsConfig(nodes=160)
    nodes = max(abs(dens.f_goe(s, lo) - dens.f_goe(s, hi)) for s in np.linspace(-4, 3, 29))
    cut = abs(dens.joint_density(0.0, -1.0, lo)
              - dens.joint_density(0.0, -1.0, replace(lo, cutoff_floor=2 * lo.cutoff_floor)))
    report(8, "self-convergence", nodes < 1e-9 and cut < 1e-9,
           f"node doubling={nodes:.2e} cutoff doubling={cut:.2e} (tol 1e-9)",
           time.perf_counter() - t0, 120)


@pytest.mark.slow
def test_criterion_9_lpp_universality(report, timed_endpoint):
    cfg = lppsim.LppConfig(q=0.5, n=500, samples=20000, seed=7)
    t0 = time.perf_counter()
    batch = lppsim.sample_endpoints(cfg, threads=THREADS)
    ks = lppsim.ks_distance(batch, timed_endpoint[0])
    kurt = lppsim.excess_kurtosis(batch.rescaled)
    report(9, "LPP endpoint universality", ks < 0.08 and abs(kurt + 0.2374) < 0.05,
           f"KS={ks:.4f} (tol 0.08) kurtosis={kurt:.4f} (target -0.2374 +- 0.05)",
           time.perf_counter() - t0, 900)
