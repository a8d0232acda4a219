"""Matplotlib PNG figures for sweep reports, drawn from the same CSV as the SVG."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .svg import PlotSpec, collect_series  # noqa: E402
from .sweep import read_csv  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "bds-lab",
}


def render_png(csv_text: str, path, spec: PlotSpec = PlotSpec(), dpi: int = 120) -> Path:
    comments, _, rows = read_csv(csv_text)
    series = collect_series(rows, spec)
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(spec.width / 96, spec.height / 96))
        for s in series:
            xs, ys = zip(*s.points)
            ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, label=s.label)
        if spec.logx:
            ax.set_xscale("log")
        if spec.logy and series:
            ax.set_yscale("log")
        ax.set_xlabel(spec.x)
        ax.set_ylabel(", ".join(spec.y))
        if spec.title:
            ax.set_title(spec.title)
        if series:
            ax.legend(frameon=False)
        if comments:
            fig.text(0.01, 0.005, comments[0].lstrip("# "), fontsize=5, color="0.4")
        fig.tight_layout()
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
        plt.close(fig)
    return path
