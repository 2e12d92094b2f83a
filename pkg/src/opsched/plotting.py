"""Render utilization traces as figures next to the delimited trace output."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

if TYPE_CHECKING:
    from .dynamics import UtilizationTrace
    from .model import ProblemInstance

__all__ = ["render_trace_figure"]


def render_trace_figure(
    trace: UtilizationTrace,
    instance: ProblemInstance,
    path: str | Path,
    title: str | None = None,
) -> Path:
    """Plot the utilization path with the allowed band and work spans shaded.

    The file format follows the path suffix (png, pdf, svg, ...).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    times = [s.time for s in trace.samples]
    ratios = [s.x for s in trace.samples]

    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    ax.plot(times, ratios, color="tab:blue", lw=1.6, label="utilization ratio")
    ax.axhline(instance.x_max, color="tab:red", ls="--", lw=1.0, label="x_max")
    ax.axhline(instance.x_min, color="tab:green", ls="--", lw=1.0, label="x_min")

    # Shade maximal working runs; breakpoints are always sampled, so run
    # boundaries coincide with exact segment boundaries.
    span_start = None
    shaded = False
    for prev, cur in zip(trace.samples, trace.samples[1:]):
        if prev.working and span_start is None:
            span_start = prev.time
        if not cur.working and span_start is not None:
            ax.axvspan(span_start, cur.time, color="tab:blue", alpha=0.12,
                       label=None if shaded else "working")
            shaded = True
            span_start = None
    if span_start is not None:
        ax.axvspan(span_start, times[-1], color="tab:blue", alpha=0.12,
                   label=None if shaded else "working")

    ax.set_xlabel("time")
    ax.set_ylabel("utilization ratio")
    ax.set_ylim(0.0, 1.0)
    ax.set_xlim(left=0.0)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
