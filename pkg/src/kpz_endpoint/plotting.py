"""Static figures rendered next to the CSV outputs.

Figures are built on ``matplotlib.figure.Figure`` directly (no pyplot state),
so they can be produced from worker threads and never open a window.
"""

import math

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

RC = {
    "axes.labelsize": 12,
    "axes.titlesize": 12,
    "xtick.labelsize": 10,
    "ytick.labelsize": 10,
    "legend.fontsize": 10,
    "svg.hashsalt": "kpz-endpoint",  # stable ids inside SVG output
}


def _figure(width=6.0, height=None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    return Figure(figsize=(width, height or width * golden))


def _save(fig, path):
    with matplotlib.rc_context(RC):
        fig.savefig(path, metadata={"Date": None}, bbox_inches="tight")
    return path


def plot_fgoe(s, values, path):
    with matplotlib.rc_context(RC):
        fig = _figure()
        ax = fig.add_subplot()
        ax.plot(s, values, color="k", lw=1.2)
        ax.set_xlabel("$s$")
        ax.set_ylabel(r"$F_{\mathrm{GOE}}(s)$")
        ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_joint(table, path, levels=14):
    """Contour plot of f(t, m): t horizontal, m vertical."""
    with matplotlib.rc_context(RC):
        fig = _figure(6.0, 4.5)
        ax = fig.add_subplot()
        tt, mm = np.meshgrid(table.t_grid, table.m_grid, indexing="ij")
        cs = ax.contour(tt, mm, table.values, levels=levels, colors="k", linewidths=0.7)
        ax.clabel(cs, fontsize=7, fmt="%.2f")
        ax.set_xlabel("$t$")
        ax.set_ylabel("$m$")
    return _save(fig, path)


def plot_endpoint(table, summary, path):
    """Endpoint density against the centered Gaussian of equal variance."""
    t = np.asarray(table.t_grid)
    with matplotlib.rc_context(RC):
        fig = _figure()
        ax = fig.add_subplot()
        ax.plot(t, table.values, color="k", lw=1.4, label=r"$f_{\mathrm{end}}$")
        var = summary.variance
        gauss = np.exp(-(t**2) / (2 * var)) / math.sqrt(2 * math.pi * var)
        ax.plot(t, gauss, "k--", lw=1.0, label=f"Gaussian, variance {var:.4f}")
        ax.set_xlabel("$t$")
        ax.legend(frameon=False)
    return _save(fig, path)


def plot_lpp(z_samples, z_ref, f_ref, path, bins=61):
    """Histogram of standardized LPP endpoints over the standardized density."""
    with matplotlib.rc_context(RC):
        fig = _figure()
        ax = fig.add_subplot()
        ax.hist(z_samples, bins=bins, density=True, color="0.8", edgecolor="0.5", lw=0.4,
                label="LPP endpoints")
        ax.plot(z_ref, f_ref, color="k", lw=1.4, label=r"$f_{\mathrm{end}}$ (standardized)")
        ax.set_xlim(-4, 4)
        ax.set_xlabel("standardized endpoint")
        ax.legend(frameon=False)
    return _save(fig, path)
