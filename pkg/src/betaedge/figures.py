"""Deterministic SVG histograms of rescaled point patterns.

Hand-rolled SVG (no plotting library) so that identical inputs produce
byte-identical files: fixed canvas, fixed 2-decimal coordinates, no ids or
timestamps.  Bars show the average per-replica count per bin; overlay curves
show the expected per-replica count of intensity measures on the same bins.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["histogram_svg"]

_W, _H = 640, 360
_ML, _MR, _MT, _MB = 50, 16, 24, 40
_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def histogram_svg(
    points: np.ndarray,
    window: tuple[float, float],
    replicas: int,
    overlays,
    bin_width: float = 0.25,
    title: str = "",
) -> str:
    """Render pooled pattern points as an SVG histogram string.

    ``overlays`` is a list of (label, intensity) pairs; each intensity needs
    a ``mass(lo, hi)`` method.  Heights are per-replica averages so the bars
    are directly comparable with the intensity masses.
    """
    lo, hi = float(window[0]), float(window[1])
    replicas = max(int(replicas), 1)
    n_bins = max(int(math.ceil((hi - lo) / bin_width - 1e-9)), 1)
    edges = np.minimum(lo + bin_width * np.arange(n_bins + 1), hi)
    pts = np.asarray(points, dtype=np.float64)
    counts, _ = np.histogram(pts, bins=edges)
    heights = counts / replicas

    curves = []
    for label, intensity in overlays:
        curves.append(
            (label, np.array([intensity.mass(edges[i], edges[i + 1]) for i in range(n_bins)]))
        )

    y_max = max(
        [float(np.max(heights)) if n_bins else 0.0]
        + [float(np.max(c)) for _, c in curves if c.size]
        + [1e-9]
    ) * 1.12

    px_w = _W - _ML - _MR
    px_h = _H - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - lo) / (hi - lo) * px_w

    def sy(y: float) -> float:
        return _MT + px_h - y / y_max * px_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{_ML}" y="16" font-family="monospace" font-size="12">{title}</text>'
        )
    # bars
    for i in range(n_bins):
        if heights[i] <= 0:
            continue
        x0, x1 = sx(edges[i]), sx(edges[i + 1])
        y0 = sy(heights[i])
        out.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
            f'height="{_fmt(sy(0.0) - y0)}" fill="#c8c8c8" stroke="#888888" '
            f'stroke-width="0.5"/>'
        )
    # overlays: step through bin centers
    for c_idx, (label, curve) in enumerate(curves):
        color = _COLORS[c_idx % len(_COLORS)]
        pts_svg = " ".join(
            f"{_fmt(sx(0.5 * (edges[i] + edges[i + 1])))},{_fmt(sy(curve[i]))}"
            for i in range(n_bins)
        )
        out.append(
            f'<polyline points="{pts_svg}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_W - _MR - 170}" y="{_MT + 14 * (c_idx + 1)}" '
            f'font-family="monospace" font-size="11" fill="{color}">{label}</text>'
        )
    # axes
    out.append(
        f'<line x1="{_ML}" y1="{_fmt(sy(0.0))}" x2="{_W - _MR}" y2="{_fmt(sy(0.0))}" '
        f'stroke="black" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_fmt(sy(0.0))}" '
        f'stroke="black" stroke-width="1"/>'
    )
    # x ticks at integers
    x_tick = math.ceil(lo)
    while x_tick <= hi:
        px = sx(x_tick)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(sy(0.0))}" x2="{_fmt(px)}" '
            f'y2="{_fmt(sy(0.0) + 4)}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_fmt(sy(0.0) + 16)}" font-family="monospace" '
            f'font-size="10" text-anchor="middle">{x_tick:g}</text>'
        )
        x_tick += 1
    # y ticks: 0, half, max
    for yv in (0.0, y_max / 2.24, y_max / 1.12):
        py = sy(yv)
        out.append(
            f'<line x1="{_ML - 4}" y1="{_fmt(py)}" x2="{_ML}" y2="{_fmt(py)}" '
            f'stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_ML - 7}" y="{_fmt(py + 3)}" font-family="monospace" '
            f'font-size="10" text-anchor="end">{yv:.2f}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
