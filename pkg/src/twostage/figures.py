"""Render the reference figures, each next to a CSV of the plotted data."""

import csv
from pathlib import Path

from . import oc, plotting
from .design import Rates

POWER_FILE = "power_vs_p2"
EARLY_STOP_FILE = "early_stop_vs_p1"
SURFACE_FILE = "power_surface_F"


def _dump(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else f"{v:.6f}" for v in row])


def render_reference_figures(rows, outdir, step=0.01, null=(0.8, 0.2), image_format="png"):
    """Write power, early-stopping and surface figures for the design-table rows.

    Designs A-H are drawn with the Stage-1 rate fixed at the null value;
    X, Y and Z count a single outcome, so their Stage-1 rate moves with p2.

    Returns:
        The list of files written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    by_label = {r.label: r.design for r in rows}

    power = {}
    for label, design in by_label.items():
        if label in "XYZ":
            grid = oc.probability_grid(1.0, step)
            power[label] = [(p, oc.reject_prob(design, Rates(p, p))) for p in grid]
        else:
            power[label] = list(oc.power_curve(design, null[0], oc.probability_grid(null[0], step)).grid)
    _dump(outdir / f"{POWER_FILE}.csv", ("label", "p2", "reject_prob"),
          [(lab, p, v) for lab, pts in power.items() for p, v in pts])
    written += [outdir / f"{POWER_FILE}.csv",
                plotting.plot_power_curves(power, outdir / f"{POWER_FILE}.{image_format}",
                                           null_p2=null[1])]

    stops = {lab: oc.early_stop_curve(d, oc.probability_grid(1.0, step))
             for lab, d in by_label.items() if lab in "ABCDEFGH"}
    _dump(outdir / f"{EARLY_STOP_FILE}.csv", ("label", "p1", "early_stop_prob"),
          [(lab, p, v) for lab, pts in stops.items() for p, v in pts])
    written += [outdir / f"{EARLY_STOP_FILE}.csv",
                plotting.plot_early_stop_curves(stops, outdir / f"{EARLY_STOP_FILE}.{image_format}")]

    grid = oc.probability_grid(1.0, max(step, 0.02))
    surface = oc.power_surface(by_label["F"], grid, grid)
    _dump(outdir / f"{SURFACE_FILE}.csv", ("p1", "p2", "reject_prob"), surface.cells())
    written += [outdir / f"{SURFACE_FILE}.csv",
                plotting.plot_power_surface(surface, outdir / f"{SURFACE_FILE}.{image_format}",
                                            null=null, title="design F")]
    return [Path(p) for p in written]
