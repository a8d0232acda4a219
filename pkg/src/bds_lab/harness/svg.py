"""Plain-text SVG line plots over harness CSV files."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

from .sweep import read_csv

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass(frozen=True)
class PlotSpec:
    x: str = "budget"
    y: tuple = ("error_mean",)
    group: Optional[str] = "epsilon"
    logx: bool = True
    logy: bool = False  # errors are often exactly 0, which a log axis cannot show
    width: int = 480
    height: int = 320
    margin: int = 56
    title: str = ""


@dataclass
class Series:
    label: str
    points: list = field(default_factory=list)


def collect_series(rows: list[dict], spec: PlotSpec) -> list[Series]:
    """Group rows into series, one per (y column, group value), points sorted by x.

    Points that cannot sit on a log axis (non-positive) are dropped.
    """
    groups: dict = {}
    for row in rows:
        key = row.get(spec.group, "") if spec.group else ""
        for col in spec.y:
            x, y = float(row[spec.x]), float(row[col])
            if (spec.logx and x <= 0) or (spec.logy and y <= 0):
                continue
            label = col if not spec.group else f"{col} {spec.group}={key}"
            groups.setdefault((col, _sort_key(key)), Series(label)).points.append((x, y))
    out = []
    for k in sorted(groups):
        s = groups[k]
        s.points.sort()
        out.append(s)
    return out


def _sort_key(v: str):
    try:
        return (0, float(v), "")
    except ValueError:
        return (1, 0.0, v)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:g}"


class _Axis:
    def __init__(self, lo: float, hi: float, log: bool, a: float, b: float):
        self.log = log
        f = math.log10 if log else float
        self.lo, self.hi = f(lo), f(hi)
        if self.hi == self.lo:
            self.lo, self.hi = self.lo - 0.5, self.hi + 0.5
        self.a, self.b = a, b

    def __call__(self, v: float) -> float:
        t = (math.log10(v) if self.log else v) - self.lo
        return self.a + (self.b - self.a) * t / (self.hi - self.lo)

    def ticks(self) -> list[float]:
        if self.log:
            decades = range(math.floor(self.lo) - 1, math.ceil(self.hi) + 1)
            for mults in ((1,), (1, 2, 5), (1, 1.5, 2, 3, 5, 7)):
                ticks = [m * 10.0 ** e for e in decades for m in mults
                         if self.lo - 1e-9 <= math.log10(m * 10.0 ** e) <= self.hi + 1e-9]
                if len(ticks) >= 3:
                    return ticks
            return ticks
        step = (self.hi - self.lo) / 4
        return [self.lo + i * step for i in range(5)]


def _bounds(values: list[float], log: bool) -> tuple[float, float]:
    if not values:
        return (1.0, 10.0) if log else (0.0, 1.0)
    lo = min(values)
    return (lo if log else min(lo, 0.0)), max(values)


def render_svg(csv_text: str, spec: PlotSpec = PlotSpec()) -> str:
    comments, _, rows = read_csv(csv_text)
    series = collect_series(rows, spec)
    xs = [p[0] for s in series for p in s.points]
    ys = [p[1] for s in series for p in s.points]
    W, H, m = spec.width, spec.height, spec.margin
    ax = _Axis(*_bounds(xs, spec.logx), spec.logx, m, W - m / 2)
    ay = _Axis(*_bounds(ys, spec.logy), spec.logy, H - m, m / 2)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
    ]
    for c in comments:
        out.append(f"<!-- {escape(c.lstrip('# ').replace('--', '- -'))} -->")
    out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    x0, x1, y0, y1 = m, W - m / 2, H - m, m / 2
    out.append(f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>')
    if series:
        for v in ax.ticks():
            px = ax(v)
            out.append(f'<line class="tick" x1="{_fmt(px)}" y1="{_fmt(y0)}" x2="{_fmt(px)}" y2="{_fmt(y0 + 4)}" stroke="black"/>')
            out.append(f'<text x="{_fmt(px)}" y="{_fmt(y0 + 16)}" font-size="10" text-anchor="middle">{_tick_label(v)}</text>')
        for v in ay.ticks():
            py = ay(v)
            out.append(f'<line class="tick" x1="{_fmt(x0 - 4)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" stroke="black"/>')
            out.append(f'<text x="{_fmt(x0 - 6)}" y="{_fmt(py + 3)}" font-size="10" text-anchor="end">{_tick_label(v)}</text>')
    out.append(f'<text x="{_fmt((x0 + x1) / 2)}" y="{H - 8}" font-size="11" text-anchor="middle">'
               f'{escape(spec.x)}{" (log)" if spec.logx else ""}</text>')
    ylab = ", ".join(spec.y) + (" (log)" if spec.logy else "")
    out.append(f'<text x="14" y="{_fmt((y0 + y1) / 2)}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})">{escape(ylab)}</text>')
    if spec.title:
        out.append(f'<text x="{_fmt(W / 2)}" y="14" font-size="12" text-anchor="middle">{escape(spec.title)}</text>')
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        d = " ".join(f"{'M' if j == 0 else 'L'}{_fmt(ax(x))},{_fmt(ay(y))}" for j, (x, y) in enumerate(s.points))
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"><title>{escape(s.label)}</title></path>')
        out.append(f'<text x="{_fmt(x1 - 4)}" y="{_fmt(y1 + 12 * (i + 1))}" font-size="10" text-anchor="end" '
                   f'fill="{color}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
