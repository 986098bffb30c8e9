"""Matplotlib rendering of the report figures (SVG, deterministic output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")  # headless backend; figures only go to files
matplotlib.rcParams["svg.hashsalt"] = "curvepulse"  # reproducible element ids
import matplotlib.pyplot as plt
import numpy as np

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def line_plot(path, x_sets, y_sets, labels, xlabel, ylabel, title,
              styles=None):
    """Simple multi-line plot; one (x, y, label) triple per curve."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, (x, y, label) in enumerate(zip(x_sets, y_sets, labels)):
        style = {} if styles is None else styles[i]
        ax.plot(x, y, label=label, **style)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if any(labels):
        ax.legend()
    _finish(fig, path)


def landscape_plot(path, a_over_pi, b, T_us, optimum=None,
                   title="Transfer time landscape"):
    """Heat map of T(a, b) with invalid cells masked; optional optimum marker."""
    a_vals = np.unique(a_over_pi)
    b_vals = np.unique(b)
    grid = np.full((len(a_vals), len(b_vals)), np.nan)
    ia = np.searchsorted(a_vals, a_over_pi)
    ib = np.searchsorted(b_vals, b)
    finite = np.isfinite(T_us)
    grid[ia[finite], ib[finite]] = T_us[finite]

    fig, ax = plt.subplots(figsize=(6.5, 5))
    masked = np.ma.masked_invalid(grid)
    vmax = min(np.nanmax(grid), 5 * np.nanmin(grid)) if finite.any() else None
    mesh = ax.pcolormesh(b_vals, a_vals, masked, shading="nearest",
                         cmap="viridis", vmax=vmax)
    fig.colorbar(mesh, ax=ax, label="T (us)")
    if optimum is not None:
        ax.plot(optimum[1], optimum[0], "ro", markersize=8, label="optimum")
        ax.legend(loc="upper right")
    ax.set_xlabel("b")
    ax.set_ylabel("a / pi")
    ax.set_title(title)
    _finish(fig, path)


def envelope_plot(path, program, title="Drive envelopes"):
    t_us = program.midpoint_times * 1e6
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t_us, program.omega_plus / (2 * np.pi * 1e6), label="omega_plus")
    if not np.array_equal(program.omega_plus, program.omega_minus):
        ax.plot(t_us, program.omega_minus / (2 * np.pi * 1e6),
                label="omega_minus", linestyle="--")
    ax.set_xlabel("t (us)")
    ax.set_ylabel("envelope / 2pi (MHz)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    _finish(fig, path)
