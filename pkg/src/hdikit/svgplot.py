"""Hand-rolled SVG scatter plot of a fitted clustering.

Emits the markup directly so identical inputs give byte-identical
files: no timestamps, no generated element ids, fixed 2-decimal
coordinates.  Points are drawn as one marker shape per cluster
(circle, square, triangle, diamond, cycling) and centroids as X marks.
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatchError

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 20, 20, 48
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f")
_SHAPES = ("circle", "square", "triangle", "diamond")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mag * mult >= raw:
            step = mag * mult
            break
    first = np.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(float(round(t, 10)))
        t += step
    return ticks


def _marker(shape: str, x: float, y: float, color: str, cluster: int) -> str:
    cls = f"point cluster-{cluster}"
    r = 3.5
    if shape == "circle":
        return (f'<circle class="{cls}" cx="{_fmt(x)}" cy="{_fmt(y)}" '
                f'r="{r}" fill="{color}" fill-opacity="0.75"/>')
    if shape == "square":
        return (f'<rect class="{cls}" x="{_fmt(x - r)}" y="{_fmt(y - r)}" '
                f'width="{_fmt(2 * r)}" height="{_fmt(2 * r)}" '
                f'fill="{color}" fill-opacity="0.75"/>')
    if shape == "triangle":
        pts = f"{_fmt(x)},{_fmt(y - r)} {_fmt(x - r)},{_fmt(y + r)} {_fmt(x + r)},{_fmt(y + r)}"
        return (f'<polygon class="{cls}" points="{pts}" '
                f'fill="{color}" fill-opacity="0.75"/>')
    pts = f"{_fmt(x)},{_fmt(y - r)} {_fmt(x + r)},{_fmt(y)} {_fmt(x)},{_fmt(y + r)} {_fmt(x - r)},{_fmt(y)}"
    return (f'<polygon class="{cls}" points="{pts}" '
            f'fill="{color}" fill-opacity="0.75"/>')


def scatter_svg(points, assignments, centroids,
                x_label: str = "HDI", y_label: str = "GDP") -> str:
    """SVG text for points colored by cluster with centroid X marks."""
    pts = np.asarray(points, dtype=float)
    assigned = np.asarray(assignments, dtype=int)
    cents = np.asarray(centroids, dtype=float)
    if pts.shape[0] != assigned.shape[0]:
        raise LengthMismatchError(
            f"{pts.shape[0]} points vs {assigned.shape[0]} assignments")

    all_x = np.concatenate([pts[:, 0], cents[:, 0]])
    all_y = np.concatenate([pts[:, 1], cents[:, 1]])
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    x_pad = (x_hi - x_lo) * 0.05 or 1.0
    y_pad = (y_hi - y_lo) * 0.05 or 1.0
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return _MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333333"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        px = sx(t)
        lines.append(f'<line x1="{_fmt(px)}" y1="{_MARGIN_T + plot_h}" '
                     f'x2="{_fmt(px)}" y2="{_MARGIN_T + plot_h + 5}" '
                     f'stroke="#333333"/>')
        lines.append(f'<text x="{_fmt(px)}" y="{_MARGIN_T + plot_h + 18}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="middle">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        py = sy(t)
        lines.append(f'<line x1="{_MARGIN_L - 5}" y1="{_fmt(py)}" '
                     f'x2="{_MARGIN_L}" y2="{_fmt(py)}" stroke="#333333"/>')
        lines.append(f'<text x="{_MARGIN_L - 8}" y="{_fmt(py + 4)}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="end">{t:g}</text>')
    lines.append(f'<text x="{_MARGIN_L + plot_w / 2:g}" y="{_HEIGHT - 12}" '
                 f'font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle">{x_label}</text>')
    lines.append(f'<text x="16" y="{_MARGIN_T + plot_h / 2:g}" '
                 f'font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle" '
                 f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:g})">'
                 f'{y_label}</text>')

    for row, cluster in zip(pts, assigned):
        color = _COLORS[cluster % len(_COLORS)]
        shape = _SHAPES[cluster % len(_SHAPES)]
        lines.append(_marker(shape, sx(row[0]), sy(row[1]), color, int(cluster)))

    for j, row in enumerate(cents):
        cx, cy = sx(row[0]), sy(row[1])
        a = 6.0
        color = _COLORS[j % len(_COLORS)]
        lines.append(
            f'<g class="centroid" stroke="{color}" stroke-width="2.5">'
            f'<line x1="{_fmt(cx - a)}" y1="{_fmt(cy - a)}" '
            f'x2="{_fmt(cx + a)}" y2="{_fmt(cy + a)}"/>'
            f'<line x1="{_fmt(cx - a)}" y1="{_fmt(cy + a)}" '
            f'x2="{_fmt(cx + a)}" y2="{_fmt(cy - a)}"/></g>')

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
