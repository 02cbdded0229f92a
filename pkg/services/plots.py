"""
Static diagnostic plots: Shepard, configuration and distance-disparity plots.

Figures are built with the object-oriented matplotlib API on an Agg canvas and
written as SVG. Plotted elements carry gids (dhat, distances, fitlines,
identity, points, label) so they can be found in the figure and in the SVG.
"""
import io
import logging
import os
from typing import Dict, Union

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure

from config import PALETTE, PLOT_DPI, PLOT_SIZE_INCHES, SVG_HASH_SALT
from models import InitResult, MDSResult, PlotSpec
from services.errors import PlotError

logger = logging.getLogger(__name__)

Result = Union[MDSResult, InitResult]

DEFAULT_TITLES = {
    "shepard": "ShepardPlot",
    "configuration": "ConfigurationPlot",
    "distdhat": "Dist-Dhat Plot",
}


def color(name: str) -> str:
    try:
        return PALETTE[name.upper()]
    except KeyError:
        raise PlotError(f"unknown colour '{name}', choose from {', '.join(sorted(PALETTE))}")


def _figure(spec: PlotSpec):
    fig = Figure(figsize=(PLOT_SIZE_INCHES, PLOT_SIZE_INCHES), dpi=PLOT_DPI)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    ax.set_title(spec.title or DEFAULT_TITLES[spec.kind])
    return fig, ax


def _is_squared(result: Result) -> bool:
    return isinstance(result, InitResult) and result.quality_kind == "sstress"


def shepard_plot(result: Result, spec: PlotSpec) -> Figure:
    """
    Dissimilarities on the horizontal axis, disparities (joined by a line) and
    distances on the vertical axis. Results of an sstress start plot squared
    distances and disparities, which gives the plot its quadratic shape.
    """
    delta = np.asarray(result.delta, dtype=float)
    dhat = np.asarray(result.dhat, dtype=float)
    dist = np.asarray(result.confdist, dtype=float)
    if _is_squared(result):
        dhat, dist = dhat ** 2, dist ** 2

    fig, ax = _figure(spec)
    order = np.argsort(delta, kind="stable")
    line_colour, point_colour = color(spec.colline), color(spec.colpoint)
    ax.plot(delta[order], dhat[order], color=line_colour, linewidth=spec.lwd,
            marker="o", markersize=4 * spec.cex, gid="dhat")
    ax.scatter(delta, dist, color=point_colour, s=16 * spec.cex ** 2, zorder=3, gid="distances")
    if spec.fitlines:
        segments = np.stack([np.column_stack([delta, dist]), np.column_stack([delta, dhat])], axis=1)
        ax.add_collection(LineCollection(segments, colors="#000000", linewidths=1.0, gid="fitlines"))
    ax.margins(0.05)
    ax.set_xlabel("delta")
    ax.set_ylabel("dhat and dist")
    return fig


def configuration_plot(result: Result, spec: PlotSpec) -> Figure:
    """Dimensions dim1 and dim2 of the configuration at equal aspect, as symbols or labels."""
    conf = np.asarray(result.conf, dtype=float)
    ndim = conf.shape[1]
    if spec.dim1 > ndim or spec.dim2 > ndim:
        raise PlotError(f"dimensions ({spec.dim1}, {spec.dim2}) requested from a {ndim}-dimensional configuration")
    if spec.labels is not None and len(spec.labels) != result.nobj:
        raise PlotError(f"{len(spec.labels)} labels for {result.nobj} objects")

    fig, ax = _figure(spec)
    xs, ys = conf[:, spec.dim1 - 1], conf[:, spec.dim2 - 1]
    point_colour = color(spec.colline)
    if spec.labels is None:
        ax.scatter(xs, ys, color=point_colour, s=16 * spec.cex ** 2, gid="points")
    else:
        for x, y, label in zip(xs, ys, spec.labels):
            ax.text(x, y, label, color=point_colour, fontsize=10 * spec.cex,
                    ha="center", va="center", gid="label")
        # text does not enter the data limits
        ax.update_datalim(np.column_stack([xs, ys]))
        ax.autoscale_view()
    ax.set_aspect("equal", adjustable="datalim")
    ax.margins(0.05)
    ax.set_xlabel(f"dimension {spec.dim1}")
    ax.set_ylabel(f"dimension {spec.dim2}")
    return fig


def dist_dhat_plot(result: Result, spec: PlotSpec) -> Figure:
    """Distances against disparities with the identity line; fitlines run orthogonally to it."""
    dhat = np.asarray(result.dhat, dtype=float)
    dist = np.asarray(result.confdist, dtype=float)

    fig, ax = _figure(spec)
    top = float(max(dhat.max(), dist.max()))
    ax.plot([0.0, top], [0.0, top], color=color(spec.colline), linewidth=spec.lwd, gid="identity")
    ax.scatter(dist, dhat, color=color(spec.colpoint), s=16 * spec.cex ** 2, zorder=3, gid="points")
    if spec.fitlines:
        foot = (dist + dhat) / 2.0
        segments = np.stack([np.column_stack([dist, dhat]), np.column_stack([foot, foot])], axis=1)
        ax.add_collection(LineCollection(segments, colors="#000000", linewidths=1.0, gid="fitlines"))
    ax.margins(0.05)
    ax.set_xlabel("dist")
    ax.set_ylabel("dhat")
    return fig


PLOTTERS = {
    "shepard": shepard_plot,
    "configuration": configuration_plot,
    "distdhat": dist_dhat_plot,
}

FILE_SUFFIXES = {
    "shepard": "shepard",
    "configuration": "conf",
    "distdhat": "distdhat",
}


def render_svg(fig: Figure) -> str:
    """SVG text of the figure; identical figures give identical bytes."""
    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def write_plots(result: Result, stem: str, **options) -> Dict[str, str]:
    """
    Write <stem>-shepard.svg, <stem>-conf.svg and <stem>-distdhat.svg.

    options are PlotSpec fields shared by the three plots. The configuration plot
    is skipped for one-dimensional results. Returns the written paths by kind.
    """
    directory = os.path.dirname(stem)
    if directory:
        os.makedirs(directory, exist_ok=True)
    written = {}
    for kind, plotter in PLOTTERS.items():
        spec = PlotSpec(kind=kind, **options)
        if kind == "configuration" and result.ndim < 2:
            logger.warning("Skipping configuration plot for a one-dimensional result")
            continue
        path = f"{stem}-{FILE_SUFFIXES[kind]}.svg"
        with open(path, "w", encoding="utf-8") as f:
            f.write(render_svg(plotter(result, spec)))
        logger.info(f"Wrote {kind} plot to {path}")
        written[kind] = path
    return written
