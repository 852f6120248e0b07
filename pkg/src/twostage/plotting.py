"""Matplotlib renderings of power curves, early-stopping curves and power surfaces.

Only the object-oriented API is used, so nothing here touches a global
backend. Install the ``plot`` extra to use this module.
"""

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.4, 4.8)


def _finish(fig, ax, path, xlabel, ylabel):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    return path


def plot_power_curves(curves, path, null_p2=None, title=None):
    """Power against the long-term rate, one line per labeled curve.

    Args:
        curves: Mapping of label to a sequence of ``(p2, reject_prob)`` points.
        path: Output file; the format follows the extension.
        null_p2: Where to draw a vertical marker for the null, if given.
    """
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    for i, (label, points) in enumerate(curves.items()):
        x, y = zip(*points)
        # the default color cycle has ten entries
        ax.plot(x, y, label=label, linestyle="-" if i < 10 else "--")
    if null_p2 is not None:
        ax.axvline(null_p2, color="grey", linestyle=":")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small", ncol=2)
    return _finish(fig, ax, path, "long-term success rate p2", "probability of rejecting H0")


def plot_early_stop_curves(curves, path, window=(0.05, 0.2), title=None):
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    for i, (label, points) in enumerate(curves.items()):
        x, y = zip(*points)
        # the default color cycle has ten entries
        ax.plot(x, y, label=label, linestyle="-" if i < 10 else "--")
    for level in window or ():
        ax.axhline(level, color="grey", linestyle=":")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small", ncol=2)
    return _finish(fig, ax, path, "Stage-1 success rate p1", "probability of early termination")


def plot_power_surface(surface, path, null=None, title=None):
    """Filled contours of rejection probability over the ``(p1, p2)`` triangle."""
    p1 = np.asarray(surface.p1_grid)
    p2 = np.asarray(surface.p2_grid)
    z = np.ma.masked_invalid(surface.grid.T)  # rows p2, columns p1
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    filled = ax.contourf(p1, p2, z, levels=np.linspace(0, 1, 11), cmap="viridis")
    ax.contour(p1, p2, z, levels=np.linspace(0.1, 0.9, 9), colors="k", linewidths=0.4)
    fig.colorbar(filled, ax=ax, label="probability of rejecting H0")
    if null is not None:
        ax.plot([null[0]], [null[1]], marker="o", color="red")
        ax.annotate("H0", null, textcoords="offset points", xytext=(6, 6), color="red")
    if title:
        ax.set_title(title)
    ax.set_xlabel("Stage-1 success rate p1")
    ax.set_ylabel("long-term success rate p2")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(path)
    return path
