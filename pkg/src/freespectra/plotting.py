"""Figure rendering for the CLI report paths (written next to the CSVs)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_density_figure(table, path, title="", simulation=None, reference=None):
    """Two-panel density/CDF figure; optional simulated-spectrum histogram."""
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9.5, 3.6))
    if simulation is not None:
        eigs = np.asarray(simulation)
        ax0.hist(eigs, bins=80, density=True, alpha=0.45,
                 color="tab:orange", label="simulation")
    ax0.plot(table.x, table.density, color="tab:blue", lw=1.4, label="limit density")
    if reference is not None:
        ax0.plot(table.x, reference.density(table.x), "k--", lw=1.0,
                 label="closed form")
    ax0.set_xlabel("x")
    ax0.set_ylabel("density")
    ax0.legend(fontsize=8)
    ax1.plot(table.x, table.F, color="tab:blue", lw=1.4)
    if reference is not None:
        ax1.plot(table.x, reference.cdf(table.x), "k--", lw=1.0)
    ax1.set_xlabel("x")
    ax1.set_ylabel("CDF")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_rates_figure(Ns, deltas, slope, intercept, path,
                      reference_slope=None, title=""):
    """Log-log distance-vs-size scatter with the fitted and guaranteed rates."""
    Ns = np.asarray(Ns, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.loglog(Ns, deltas, "o", color="tab:blue", label="measured")
    xs = np.linspace(Ns.min(), Ns.max(), 50)
    ax.loglog(xs, np.exp(intercept) * xs**slope, "-", color="tab:blue",
              lw=1.0, label=f"fit slope {slope:.3f}")
    if reference_slope is not None:
        anchor = deltas[0] / Ns[0] ** reference_slope
        ax.loglog(xs, anchor * xs**reference_slope, "k--", lw=1.0,
                  label=f"guaranteed slope {reference_slope:.3f}")
    ax.set_xlabel("N")
    ax.set_ylabel("Kolmogorov distance")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_modulus_figure(report, path, title=""):
    """Log-log CDF increment modulus with its power-law fit."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.loglog(report.deltas, report.modulus, "o", color="tab:blue",
              label="modulus")
    fit = report.constant * np.asarray(report.deltas) ** report.raw_slope
    ax.loglog(report.deltas, fit, "-", color="tab:orange", lw=1.0,
              label=f"fit exponent {report.raw_slope:.3f}")
    ax.set_xlabel("window")
    ax.set_ylabel("max CDF increment")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
