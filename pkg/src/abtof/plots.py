"""Figure rendering for the CLI report paths.

Each command that emits tabular data can also render a matplotlib figure
next to it.  Figures are written through the Agg backend with pinned
metadata so that re-running a command reproduces the PNG byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Software": "abtof"}}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def save_delay_line(path, currents, delays, title="Force-hypothesis delay"):
    """Predicted delay vs current (the solid-line figure)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(currents) * 1e3, np.asarray(delays) * 1e9, "r-", lw=2,
            label="force hypothesis")
    ax.set_xlabel("solenoid current (mA)")
    ax.set_ylabel("time delay (ns)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    _finish(fig, path)


def save_delay_curve(path, currents, delays, errors, force_slope, verdict):
    """Measured delays with error bars against both hypothesis lines."""
    currents = np.asarray(currents)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(currents * 1e3, np.asarray(delays) * 1e9,
                yerr=np.asarray(errors) * 1e9, fmt="ko", ms=4, capsize=3,
                label="extracted delays")
    grid = np.linspace(0.0, float(np.max(currents)), 50)
    ax.plot(grid * 1e3, force_slope * grid * 1e9, "r-", lw=2, label="force hypothesis")
    ax.axhline(0.0, color="b", lw=1.5, ls="--", label="zero force")
    ax.set_xlabel("solenoid current (mA)")
    ax.set_ylabel("delay vs reference (ns)")
    ax.set_title(f"delay vs current (verdict: {verdict})")
    ax.grid(alpha=0.3)
    ax.legend()
    _finish(fig, path)


def save_tof_spectra(path, spectra):
    """Overlayed arrival-time histograms for up to three settings."""
    picks = spectra if len(spectra) <= 3 else [spectra[0], spectra[len(spectra) // 2], spectra[-1]]
    fig, ax = plt.subplots(figsize=(6, 4))
    for spectrum in picks:
        centers = 0.5 * (spectrum.bin_edges[:-1] + spectrum.bin_edges[1:])
        ax.step(centers * 1e9, spectrum.counts, where="mid",
                label=f"I = {spectrum.current * 1e3:.3g} mA")
    ax.set_xlabel("arrival time (ns)")
    ax.set_ylabel("counts")
    ax.set_title("time-of-flight spectra")
    ax.grid(alpha=0.3)
    ax.legend()
    _finish(fig, path)


def save_arrival_vs_energy(path, energies_ev, arrivals, errors, fit_length, fit_exponent):
    """Mean arrival times vs energy with the fitted power law."""
    energies_ev = np.asarray(energies_ev, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(energies_ev, np.asarray(arrivals) * 1e9,
                yerr=np.asarray(errors) * 1e9, fmt="ko", ms=4, capsize=3,
                label="simulated arrivals")
    from .core import CODATA2018

    grid = np.linspace(float(np.min(energies_ev)), float(np.max(energies_ev)), 100)
    q = CODATA2018.electron_charge_magnitude
    m = CODATA2018.electron_mass
    model = fit_length * np.sqrt(m / 2.0) * (grid * q) ** fit_exponent
    ax.plot(grid, model * 1e9, "r-", lw=2,
            label=f"fit: exponent {fit_exponent:.4f}")
    ax.set_xlabel("kinetic energy (eV)")
    ax.set_ylabel("arrival time (ns)")
    ax.set_title("ballistic energy-time behavior")
    ax.grid(alpha=0.3)
    ax.legend()
    _finish(fig, path)


def save_force_convergence(path, lengths_over_radius, d_over_radius, rel_errors):
    """Quadrature-vs-closed-form relative error against stack length."""
    lengths = np.asarray(lengths_over_radius, dtype=float)
    d_vals = np.asarray(d_over_radius, dtype=float)
    errors = np.asarray(rel_errors, dtype=float).reshape(len(d_vals), len(lengths))
    fig, ax = plt.subplots(figsize=(6, 4))
    for row, d in zip(errors, d_vals):
        ax.loglog(lengths, row, "o-", label=f"d = {d:g} r")
    ax.axhline(0.01, color="k", ls="--", lw=1, label="1% target")
    ax.set_xlabel("stack length / loop radius")
    ax.set_ylabel("relative error vs closed form")
    ax.set_title("loop-stack force convergence")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    _finish(fig, path)


def save_phase_deviation(path, labels, deviations, tolerance):
    """Phase-equivalence deviation per grid combination."""
    fig, ax = plt.subplots(figsize=(7, 4))
    x = np.arange(len(deviations))
    ax.semilogy(x, np.maximum(np.asarray(deviations, dtype=float), 1e-18), "ko")
    ax.axhline(tolerance, color="r", ls="--", lw=1, label=f"tolerance {tolerance:g}")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("relative phase deviation")
    ax.set_title("displacement phase vs enclosed-flux phase")
    ax.grid(alpha=0.3)
    ax.legend()
    _finish(fig, path)
