"""Figure rendering for the CLI report path.

Each function writes one PNG next to the delimited output files. Rendering
is opt-in (``--plot``); the CSV artifacts remain the primary output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_series", "plot_classifier", "plot_trace", "plot_field"]


def plot_series(series, path) -> None:
    """Displacement and voltage channels against time."""
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    t = series.t
    axes[0].plot(t, series.x, lw=0.5)
    axes[0].set_ylabel("displacement x")
    axes[1].plot(t, series.v, lw=0.5, color="tab:red")
    axes[1].set_ylabel("voltage v")
    axes[1].set_xlabel("time")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_classifier(result, path) -> None:
    """Scatter of per-frequency K_c values with the median marked."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(result.c_values, result.k_c_values, "x", ms=4)
    ax.axhline(result.k, color="tab:red", lw=1, label=f"K = {result.k:.4f}")
    ax.set_xlabel("projection frequency c")
    ax.set_ylabel("$K_c$")
    ax.set_ylim(-1.05, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_trace(trace, names, path) -> None:
    """Convergence of the level-best power and the hyper-parameter spread."""
    levels = [r.level for r in trace]
    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    axes[0].plot(levels, [r.power for r in trace], "o-", ms=3, label="level best P")
    axes[0].set_ylabel("mean power P")
    axes[0].legend()
    sig = np.array([r.sigma for r in trace])
    for i, name in enumerate(names):
        axes[1].semilogy(levels, sig[:, i], "o-", ms=3, label=f"sigma[{name}]")
    axes[1].set_ylabel("std. deviation")
    axes[1].set_xlabel("level")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_field(field, names, resolution, path, best=None) -> None:
    """Contour maps of power and constraint over a 2-D design grid.

    Only the two-dimensional case is drawable; higher-dimensional fields are
    skipped silently by the caller.
    """
    nx, ny = resolution
    x = field[:, 0].reshape(nx, ny)
    y = field[:, 1].reshape(nx, ny)
    p = field[:, 2].reshape(nx, ny)
    k = field[:, 3].reshape(nx, ny)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2))
    for ax, z, label in ((axes[0], k, "constraint K"), (axes[1], p, "mean power P")):
        im = ax.contourf(x, y, z, levels=30)
        fig.colorbar(im, ax=ax, label=label)
        if best is not None:
            ax.plot(best[0], best[1], "r+", ms=12, mew=2)
        ax.set_xlabel(names[0])
        ax.set_ylabel(names[1])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
