"""Self-contained, deterministic SVG 1.1 curve plots.

One polyline in an 800x800 viewbox with a 5% margin, plus axis lines and
text annotations.  Output is a pure function of the inputs (fixed number
formatting, no timestamps), so repeated runs are byte-identical.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

SIZE = 800
MARGIN_FRAC = 0.05


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_curve(
    xs: Sequence[float],
    ys: Sequence[float],
    title: str = "",
    annotation: str = "",
    x_label: str = "x1",
    y_label: str = "x2",
) -> str:
    """Return the SVG document for the curve (ys against xs)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size != ys.size or xs.size < 2:
        raise ValueError("need two equal-length coordinate arrays")
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    x_span = x_hi - x_lo or 1.0
    y_span = y_hi - y_lo or 1.0
    margin = MARGIN_FRAC * SIZE
    inner = SIZE - 2.0 * margin

    def sx(v):
        return margin + (v - x_lo) / x_span * inner

    def sy(v):
        # SVG y grows downward
        return SIZE - margin - (v - y_lo) / y_span * inner

    points = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(xs, ys))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<rect x="{_fmt(margin)}" y="{_fmt(margin)}" width="{_fmt(inner)}" '
        f'height="{_fmt(inner)}" fill="none" stroke="#888" stroke-width="1"/>',
    ]
    # axis lines through the data origin when it lies inside the window
    if x_lo < 0.0 < x_hi:
        parts.append(
            f'<line x1="{_fmt(sx(0.0))}" y1="{_fmt(margin)}" '
            f'x2="{_fmt(sx(0.0))}" y2="{_fmt(SIZE - margin)}" '
            f'stroke="#ccc" stroke-width="1"/>'
        )
    if y_lo < 0.0 < y_hi:
        parts.append(
            f'<line x1="{_fmt(margin)}" y1="{_fmt(sy(0.0))}" '
            f'x2="{_fmt(SIZE - margin)}" y2="{_fmt(sy(0.0))}" '
            f'stroke="#ccc" stroke-width="1"/>'
        )
    parts.append(
        f'<polyline fill="none" stroke="#1a4f8b" stroke-width="1.5" '
        f'points="{points}"/>'
    )
    if title:
        parts.append(
            f'<text x="{SIZE // 2}" y="{_fmt(0.6 * margin)}" font-size="18" '
            f'font-family="monospace" text-anchor="middle">{title}</text>'
        )
    if annotation:
        parts.append(
            f'<text x="{SIZE // 2}" y="{_fmt(SIZE - 0.3 * margin)}" '
            f'font-size="12" font-family="monospace" '
            f'text-anchor="middle">{annotation}</text>'
        )
    parts.append(
        f'<text x="{_fmt(SIZE - margin)}" y="{_fmt(SIZE - margin + 16)}" '
        f'font-size="12" font-family="monospace" '
        f'text-anchor="end">{x_label}</text>'
    )
    parts.append(
        f'<text x="{_fmt(margin - 4)}" y="{_fmt(margin)}" font-size="12" '
        f'font-family="monospace" text-anchor="end">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_curve(path, xs, ys, **kwargs) -> str:
    with open(path, "w") as fh:
        fh.write(render_curve(xs, ys, **kwargs))
    return path
