"""Matplotlib rendering of the standard report figures.

Each function writes one PNG next to the delimited output it illustrates.
Figures are a convenience view; the CSV/JSON files remain the quantitative
record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .abstract_modes import ThetaFit
from .damping import DampingProfile
from .evolution import EnergyTrace
from .resolvent import GEVREY_EXPONENT, SweepResult
from .spectral import SpectrumReport

__all__ = [
    "spectrum_figure",
    "sweep_figure",
    "trace_figure",
    "theta_figure",
    "profile_figure",
]


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def spectrum_figure(report: SpectrumReport, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ev = report.eigenvalues
    ax.scatter(ev.real, ev.imag, s=6, alpha=0.7)
    ax.axvline(0.0, color="k", lw=0.6)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(f"spectrum (abscissa {report.abscissa:.4g})")
    return _save(fig, path)


def sweep_figure(sweep: SweepResult, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(sweep.lambdas, sweep.norms, "o-", ms=3, lw=0.8, label="norm")
    lo, hi = sweep.fit_band
    band = np.geomspace(lo, hi, 50)
    fit = sweep.fit
    ax.loglog(band, fit.prefactor * band**(-fit.gamma), "r--",
              label=f"fit slope -{fit.gamma:.3f}")
    ref = sweep.norms[np.argmin(np.abs(sweep.lambdas - lo))]
    ax.loglog(band, ref * (band / lo) ** (-GEVREY_EXPONENT), "g:",
              label=f"slope -{GEVREY_EXPONENT}")
    ax.axvspan(lo, hi, color="0.9", zorder=0)
    ax.set_xlabel("shift magnitude")
    ax.set_ylabel("resolvent norm")
    ax.legend()
    return _save(fig, path)


def trace_figure(trace: EnergyTrace, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.semilogy(trace.times, np.maximum(trace.energies, 1e-300), label="E")
    if trace.q_energies is not None:
        ax.semilogy(trace.times, np.maximum(trace.q_energies, 1e-300), label="q energy")
        ax.semilogy(trace.times, np.maximum(trace.p_energies, 1e-300), label="p energy")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    return _save(fig, path)


def theta_figure(fits: list[ThetaFit], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    thetas = np.array([f.theta for f in fits])
    gammas = np.array([f.gamma for f in fits])
    order = np.argsort(thetas)
    ax.plot(thetas[order], gammas[order], "o-", label="fitted")
    grid = np.linspace(-1, 1, 201)
    expected = np.where(grid >= 0, np.minimum(2 * grid, 2 * (1 - grid)), 2 * grid)
    ax.plot(grid, expected, "k--", lw=0.8, label="2 min(theta, 1-theta)")
    ax.set_xlabel("damping exponent")
    ax.set_ylabel("fitted norm exponent")
    ax.legend()
    return _save(fig, path)


def profile_figure(profile: DampingProfile, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    x = np.linspace(0, 1, 2001)
    ax.plot(x, profile(x), label="a(x)")
    if profile.kind == "smooth":
        ax.plot(x, profile(x, order=1) * profile.transition, ":",
                label="a' (scaled by tau)")
    ax.set_xlabel("x")
    ax.set_ylabel("damping")
    ax.legend()
    return _save(fig, path)
