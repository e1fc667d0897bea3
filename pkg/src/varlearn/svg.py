"""Minimal static SVG rendering for dimension diagrams and barcodes."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .dimension import DimensionDiagram
from .topology import Barcode

__all__ = ["diagram_svg", "barcode_svg"]

_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
W, H, PAD = 640, 400, 50


def _frame(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
    ]


def _tick(x, y, label, anchor="middle"):
    return f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{label}</text>'


def diagram_svg(diagram: DimensionDiagram, title: str = "dimension diagram") -> str:
    grid = list(diagram.grid)
    top = max(1, diagram.n)
    sx = lambda e: PAD + (W - 2 * PAD) * e  # noqa: E731
    sy = lambda v: H - PAD - (H - 2 * PAD) * min(v, top) / top  # noqa: E731
    out = _frame(title)
    for k in range(top + 1):
        out.append(_tick(PAD - 6, sy(k) + 3, k, "end"))
    for e in (0.0, 0.25, 0.5, 0.75, 1.0):
        out.append(_tick(sx(e), H - PAD + 14, f"{e:g}"))
    for idx, (name, curve) in enumerate(diagram.curves.items()):
        color = _COLORS[idx % len(_COLORS)]
        segment: list[str] = []
        runs = []
        for e, v in zip(grid, curve):
            if v is None or not math.isfinite(v):
                if segment:
                    runs.append(segment)
                segment = []
                continue
            segment.append(f"{sx(e):.1f},{sy(v):.1f}")
        if segment:
            runs.append(segment)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(run)}"/>')
        out.append(
            f'<text x="{W - PAD + 4}" y="{PAD + 14 * idx}" fill="{color}" font-family="sans-serif" font-size="10">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def barcode_svg(barcode: Barcode, max_scale: float = 1.0, title: str = "barcode") -> str:
    bars = [(p, b, d) for p in sorted(barcode.dims) for b, d in barcode[p]]
    out = _frame(title)
    sx = lambda v: PAD + (W - 2 * PAD) * min(v, max_scale) / max_scale  # noqa: E731
    for frac in (0.0, 0.5, 1.0):
        out.append(_tick(sx(frac * max_scale), H - PAD + 14, f"{frac * max_scale:g}"))
    step = (H - 2 * PAD) / max(1, len(bars))
    for row, (p, b, d) in enumerate(bars):
        y = PAD + step * (row + 0.5)
        color = _COLORS[p % len(_COLORS)]
        dash = ' stroke-dasharray="4,2"' if math.isinf(d) else ""
        out.append(
            f'<line x1="{sx(b):.1f}" y1="{y:.1f}" x2="{sx(d):.1f}" y2="{y:.1f}" stroke="{color}" '
            f'stroke-width="{max(0.5, min(3.0, step * 0.6)):.2f}"{dash}/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
