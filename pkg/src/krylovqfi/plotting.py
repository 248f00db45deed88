"""Static SVG figures for the command-line runs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed element ids keep repeated runs byte-identical
matplotlib.rcParams["svg.hashsalt"] = "krylovqfi"
matplotlib.rcParams["svg.fonttype"] = "none"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def spacing_histogram(path, rows, title: str = ""):
    rows = np.asarray(rows, dtype=float)
    left, right, density, surmise = rows.T
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.bar(left, density, width=right - left, align="edge", alpha=0.5, label="data")
    ax.plot(0.5 * (left + right), surmise, "k-", label="surmise")
    ax.set_xlabel("S")
    ax.set_ylabel("P(S)")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def qfi_trace(path, trace, prediction: float | None = None, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    for axis, values in trace.qfi.items():
        ax.plot(trace.times[1:], np.maximum(values[1:], 1e-12), lw=0.8, label=f"J{axis}")
    if prediction is not None:
        ax.axhline(prediction, color="k", ls="--", lw=1, label="prediction")
    ax.axvspan(*trace.window, color="0.9", zorder=0)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("QFI")
    ax.set_title(title)
    ax.legend(fontsize=7)
    _save(fig, path)


def scaling(path, ns, values, predictions, fit=None, title: str = ""):
    ns = np.asarray(ns, dtype=float)
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.loglog(ns, values, "o", label="time average")
    ax.loglog(ns, predictions, "k--", label="prediction")
    if fit is not None:
        grid = np.geomspace(ns.min(), ns.max(), 50)
        ax.loglog(grid, fit.prefactor * grid**fit.exponent, "r-", lw=0.8,
                  label=f"{fit.prefactor:.3g} N^{fit.exponent:.3f}")
    ax.set_xlabel("N")
    ax.set_ylabel("mean QFI")
    ax.set_title(title)
    ax.legend(fontsize=7)
    _save(fig, path)


def heatmap(path, x, y, values, xlabel: str, ylabel: str, title: str = ""):
    fig, ax = plt.subplots(figsize=(4.5, 3.6))
    mesh = ax.pcolormesh(x, y, values, shading="nearest")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _save(fig, path)


def sphere_field(path, field, title: str = ""):
    """Equirectangular projection of a field on the sphere."""
    fig, ax = plt.subplots(figsize=(5, 2.8))
    mesh = ax.pcolormesh(field.phi, field.theta, field.values, shading="nearest", cmap="RdBu_r",
                         vmin=-np.abs(field.values).max(), vmax=np.abs(field.values).max())
    fig.colorbar(mesh, ax=ax)
    ax.invert_yaxis()
    ax.set_xlabel("phi")
    ax.set_ylabel("theta")
    ax.set_title(title)
    _save(fig, path)
