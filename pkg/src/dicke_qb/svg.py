"""Minimal deterministic SVG plots: line charts and heatmaps.

These are a convenience view of the CSV data, not an acceptance surface.
Output is plain SVG with axes, ticks and a title; numbers are formatted
with a fixed locale-independent format so identical inputs give identical
bytes.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 24, 40, 48

_SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

# blue -> yellow, 5-stop linear ramp
_RAMP = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def _color(u: float) -> str:
    u = min(max(u, 0.0), 1.0)
    pos = u * (len(_RAMP) - 1)
    i = min(int(pos), len(_RAMP) - 2)
    f = pos - i
    r, g, b = (round(a + f * (b2 - a)) for a, b2 in zip(_RAMP[i], _RAMP[i + 1]))
    return f"#{r:02x}{g:02x}{b:02x}"


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="{MARGIN_T - 16}" text-anchor="middle" font-size="14">{title}</text>',
    ]


def _axes(xlabel: str, ylabel: str, xlo, xhi, ylo, yhi) -> list[str]:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    out = [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 10}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{(y0 + y1) // 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) // 2})">{ylabel}</text>',
    ]
    for tx in _ticks(xlo, xhi):
        px = x0 + (tx - xlo) / (xhi - xlo or 1.0) * (x1 - x0)
        out.append(f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px)}" y="{y0 + 18}" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _ticks(ylo, yhi):
        py = y0 - (ty - ylo) / (yhi - ylo or 1.0) * (y0 - y1)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{_fmt(py)}" text-anchor="end" dominant-baseline="middle">{_fmt(ty)}</text>')
    return out


def line_plot(
    path,
    x: Sequence[float],
    series: dict[str, Sequence[float]],
    title: str,
    xlabel: str,
    ylabel: str,
) -> None:
    """Write a multi-series line plot to `path`."""
    x = np.asarray(x, dtype=float)
    ys = {label: np.asarray(v, dtype=float) for label, v in series.items()}
    xlo, xhi = float(x.min()), float(x.max())
    all_y = np.concatenate(list(ys.values()))
    ylo, yhi = float(all_y.min()), float(all_y.max())
    if ylo == yhi:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T

    parts = _header(title) + _axes(xlabel, ylabel, xlo, xhi, ylo, yhi)
    for k, (label, y) in enumerate(ys.items()):
        color = _SERIES_COLORS[k % len(_SERIES_COLORS)]
        pts = " ".join(
            f"{_fmt(x0 + (xv - xlo) / (xhi - xlo or 1.0) * (x1 - x0))},"
            f"{_fmt(y0 - (yv - ylo) / (yhi - ylo) * (y0 - y1))}"
            for xv, yv in zip(x, y)
        )
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{x1 - 8}" y="{y1 + 16 + 14 * k}" text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    _write(path, parts)


def heatmap(
    path,
    x_values: Sequence[float],
    y_values: Sequence[float],
    grid: np.ndarray,
    title: str,
    xlabel: str,
    ylabel: str,
) -> None:
    """Write a heatmap of grid[i, k] over (y_values[i], x_values[k]) to `path`."""
    xs = np.asarray(x_values, dtype=float)
    ys = np.asarray(y_values, dtype=float)
    z = np.asarray(grid, dtype=float)
    finite = z[np.isfinite(z)]
    zlo = float(finite.min()) if finite.size else 0.0
    zhi = float(finite.max()) if finite.size else 1.0
    span = (zhi - zlo) or 1.0
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    cw = (x1 - x0) / len(xs)
    ch = (y0 - y1) / len(ys)

    parts = _header(f"{title} [{_fmt(zlo)}, {_fmt(zhi)}]")
    parts += _axes(xlabel, ylabel, float(xs.min()), float(xs.max()), float(ys.min()), float(ys.max()))
    for i in range(len(ys)):
        for k in range(len(xs)):
            v = z[i, k]
            fill = _color((v - zlo) / span) if np.isfinite(v) else "#cccccc"
            px = x0 + k * cw
            py = y0 - (i + 1) * ch
            parts.append(
                f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cw)}" height="{_fmt(ch)}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    _write(path, parts)


def _write(path, parts: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
