"""Quadrant scatter rendering (SVG).

Rendering goes through a bare Figure (no pyplot, no global state) with a
pinned svg.hashsalt and stripped Date metadata so that identical inputs
produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from matplotlib import rc_context
from matplotlib.figure import Figure

from .strategy import StrategicPoint, ZONES

_ZONE_COLORS = {
    "I_pioneering": "#1b7837",
    "II_niche": "#2166ac",
    "III_shadow": "#878787",
    "IV_follower": "#b2182b",
}

_X_LABEL = "within-industry representativeness (z)"
_Y_LABEL = "cross-sector distinctiveness (z)"


def quadrant_scatter_svg(
    points: Sequence[StrategicPoint],
    thresholds: tuple[float, float],
    path: str | Path,
    year: int,
) -> None:
    """Write one year's strategic positions as an SVG quadrant plot."""
    mx, my = thresholds
    with rc_context({"svg.hashsalt": "esg-trendlab"}):
        fig = Figure(figsize=(6.0, 6.0))
        ax = fig.add_subplot(111)
        for zone in ZONES:
            xs = [p.x for p in points if p.zone == zone]
            ys = [p.y for p in points if p.zone == zone]
            if xs:
                ax.scatter(xs, ys, s=36, color=_ZONE_COLORS[zone], label=zone)
        ax.axvline(mx, color="#444444", linewidth=0.8, linestyle="--")
        ax.axhline(my, color="#444444", linewidth=0.8, linestyle="--")
        for p in points:
            ax.annotate(
                p.company_id,
                (p.x, p.y),
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=7,
            )
        ax.set_xlabel(_X_LABEL)
        ax.set_ylabel(_Y_LABEL)
        ax.set_title(f"strategic positions {year}")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
