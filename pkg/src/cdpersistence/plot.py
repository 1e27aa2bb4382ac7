"""Self-contained SVG rendering of persistence diagrams (no plotting dependency)."""
from __future__ import annotations

import math
from collections import Counter
from xml.sax.saxutils import escape

import numpy as np

from .persistence import PersistenceDiagram

SIZE = 600
PAD = 60          # room for tick labels
INF_BAND = 24     # strip above the plot area holding infinite deaths
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _extent(diagram: PersistenceDiagram) -> tuple[float, float]:
    vals = [a[np.isfinite(a)] for a in diagram.intervals.values()]
    vals = np.concatenate(vals) if vals else np.empty(0)
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        hi = lo + 1.0
    margin = 0.1 * (hi - lo)
    return lo - margin, hi + margin


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    step = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(step))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= step), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [round(start + i * step, 12) for i in range(int((hi - start) / step) + 1)]


def diagram_svg(diagram: PersistenceDiagram, title: str | None = None) -> str:
    """Birth/death scatter plot as an SVG string.

    Coincident intervals collapse to one marker labelled with their count;
    infinite deaths sit in a band above the plot area, drawn as triangles.
    """
    lo, hi = _extent(diagram)
    top = PAD + INF_BAND
    span = SIZE - PAD - top

    def sx(v):
        return PAD + (v - lo) / (hi - lo) * span

    def sy(v):
        return SIZE - PAD - (v - lo) / (hi - lo) * span

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">',
           f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>']
    if title:
        out.append(f'<text x="{SIZE / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    # axes, ticks, diagonal
    x0, y0, x1, y1 = sx(lo), sy(lo), sx(hi), sy(hi)
    out.append(f'<rect x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" height="{y0 - y1:.2f}" '
               'fill="none" stroke="black"/>')
    out.append(f'<line class="diagonal" x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
               'stroke="gray" stroke-dasharray="4 3"/>')
    inf_y = PAD + INF_BAND / 2
    out.append(f'<line x1="{x0:.2f}" y1="{inf_y:.2f}" x2="{x1:.2f}" y2="{inf_y:.2f}" stroke="#bbb"/>')
    out.append(f'<text x="{x0 - 6:.2f}" y="{inf_y + 4:.2f}" text-anchor="end">inf</text>')
    for t in _ticks(lo, hi):
        out.append(f'<text x="{sx(t):.2f}" y="{y0 + 16:.2f}" text-anchor="middle">{t:g}</text>')
        out.append(f'<text x="{x0 - 6:.2f}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{SIZE - 20}" text-anchor="middle">birth</text>')
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.2f})">death</text>')

    for p in diagram.degrees:
        color = COLORS[p % len(COLORS)]
        counts = Counter((float(b), float(d)) for b, d in diagram[p])
        for (b, d), mult in sorted(counts.items()):
            cx = sx(b)
            if math.isinf(d):
                cy = inf_y
                out.append(f'<polygon class="inf" data-degree="{p}" points="{cx - 5:.2f},{cy + 4:.2f} '
                           f'{cx + 5:.2f},{cy + 4:.2f} {cx:.2f},{cy - 5:.2f}" fill="{color}"/>')
            else:
                cy = sy(d)
                out.append(f'<circle class="point" data-degree="{p}" cx="{cx:.2f}" cy="{cy:.2f}" '
                           f'r="4" fill="{color}" fill-opacity="0.8"/>')
            if mult > 1:
                out.append(f'<text class="mult" x="{cx + 6:.2f}" y="{cy - 6:.2f}">{mult}</text>')
    # legend
    for i, p in enumerate(diagram.degrees):
        y = top + 14 + 16 * i
        out.append(f'<circle cx="{x0 + 14:.2f}" cy="{y - 4}" r="4" fill="{COLORS[p % len(COLORS)]}"/>')
        out.append(f'<text x="{x0 + 24:.2f}" y="{y}">H{p}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
