"""Minimal self-contained SVG plotting: log-log line charts and scatter
panel grids. No plotting toolchain; output bytes are deterministic for
identical inputs (fixed float formatting, no timestamps)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

__all__ = ["LineSeries", "ScatterPanel", "loglog_plot", "scatter_grid", "save_svg"]

SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# compact viridis-style gradient for scatter coloring
_CMAP = ((0.267, 0.005, 0.329), (0.283, 0.141, 0.458), (0.254, 0.265, 0.530),
         (0.207, 0.372, 0.553), (0.164, 0.471, 0.558), (0.128, 0.567, 0.551),
         (0.135, 0.659, 0.518), (0.267, 0.749, 0.441), (0.478, 0.821, 0.318),
         (0.741, 0.873, 0.150), (0.993, 0.906, 0.144))


def _cmap(t: float) -> str:
    t = min(1.0, max(0.0, t))
    pos = t * (len(_CMAP) - 1)
    i = min(int(pos), len(_CMAP) - 2)
    f = pos - i
    rgb = [(1 - f) * _CMAP[i][c] + f * _CMAP[i + 1][c] for c in range(3)]
    return "#" + "".join(f"{round(255 * v):02x}" for v in rgb)


def _num(x: float) -> str:
    return f"{x:.2f}"


@dataclass(frozen=True)
class LineSeries:
    label: str
    x: Sequence[float]
    y: Sequence[float]


@dataclass(frozen=True)
class ScatterPanel:
    title: str
    x: Sequence[float]
    y: Sequence[float]
    color_by: Sequence[float] | None = None  # mapped through the gradient


def _log_ticks(lo: float, hi: float) -> list[float]:
    first = math.floor(math.log10(lo))
    last = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(first, last + 1) if lo <= 10.0 ** e <= hi * (1 + 1e-12)]


def _fmt_tick(v: float) -> str:
    if 0.01 <= v < 10000 and float(v).is_integer():
        return str(int(v))
    exp = math.log10(v)
    if float(exp).is_integer():
        return f"1e{int(exp)}"
    return f"{v:g}"


def loglog_plot(
    series: Sequence[LineSeries],
    title: str,
    x_label: str,
    y_label: str,
    x_ticks: Sequence[float] | None = None,
    width: int = 720,
    height: int = 480,
) -> str:
    """Log-log chart with one polyline per series and a legend.

    Nonpositive values cannot be placed on log axes; such points are dropped
    from their polyline (the series keeps its remaining points).
    """
    pts = [(x, y) for s in series for x, y in zip(s.x, s.y) if x > 0 and y > 0]
    if not pts:
        raise ValueError("nothing to plot: no positive (x, y) points")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo / 2, x_hi * 2
    if y_lo == y_hi:
        y_lo, y_hi = y_lo / 2, y_hi * 2

    ml, mr, mt, mb = 70, 20, 40, 55
    pw, ph = width - ml - mr, height - mt - mb

    def px(v: float) -> float:
        return ml + (math.log10(v) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo)) * pw

    def py(v: float) -> float:
        return mt + ph - (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="15">{title}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]

    xt = list(x_ticks) if x_ticks is not None else _log_ticks(x_lo, x_hi)
    for v in xt:
        if not (x_lo <= v <= x_hi * (1 + 1e-12)):
            continue
        x = px(v)
        out.append(f'<line class="x-tick" x1="{_num(x)}" y1="{mt + ph}" x2="{_num(x)}" y2="{mt + ph + 5}" stroke="#333"/>')
        out.append(f'<text x="{_num(x)}" y="{mt + ph + 18}" text-anchor="middle">{_fmt_tick(v)}</text>')
    for v in _log_ticks(y_lo, y_hi):
        y = py(v)
        out.append(f'<line class="y-tick" x1="{ml - 5}" y1="{_num(y)}" x2="{ml}" y2="{_num(y)}" stroke="#333"/>')
        out.append(f'<text x="{ml - 8}" y="{_num(y + 4)}" text-anchor="end">{_fmt_tick(v)}</text>')
        out.append(f'<line x1="{ml}" y1="{_num(y)}" x2="{ml + pw}" y2="{_num(y)}" stroke="#ddd" stroke-width="0.5"/>')
    out.append(f'<text x="{ml + pw / 2:.0f}" y="{height - 12}" text-anchor="middle">{x_label}</text>')
    out.append(
        f'<text x="18" y="{mt + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {mt + ph / 2:.0f})">{y_label}</text>'
    )

    for idx, s in enumerate(series):
        color = SERIES_COLORS[idx % len(SERIES_COLORS)]
        keep = [(x, y) for x, y in zip(s.x, s.y) if x > 0 and y > 0]
        if not keep:
            continue
        path = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in keep)
        out.append(
            f'<g class="series" id="series-{s.label}">'
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for x, y in keep:
            out.append(f'<circle cx="{_num(px(x))}" cy="{_num(py(y))}" r="2.5" fill="{color}"/>')
        out.append("</g>")
        ly = mt + 16 + 16 * idx
        out.append(f'<line x1="{ml + pw - 110}" y1="{ly}" x2="{ml + pw - 85}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw - 78}" y="{ly + 4}">{s.label}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


def scatter_grid(
    panels: Sequence[ScatterPanel],
    title: str,
    n_cols: int,
    panel_size: int = 190,
    point_radius: float = 1.0,
) -> str:
    """Grid of equal-aspect scatter panels, one <g class="panel"> each."""
    if not panels:
        raise ValueError("no panels to draw")
    n = len(panels)
    n_cols = max(1, min(n_cols, n))
    n_rows = (n + n_cols - 1) // n_cols
    pad, head = 14, 26
    width = n_cols * (panel_size + pad) + pad
    height = n_rows * (panel_size + head) + pad + 30

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="15">{title}</text>',
    ]
    for idx, p in enumerate(panels):
        row, col = divmod(idx, n_cols)
        ox = pad + col * (panel_size + pad)
        oy = 30 + pad + row * (panel_size + head)
        xs = list(p.x)
        ys = list(p.y)
        out.append(f'<g class="panel" id="panel-{idx}">')
        out.append(f'<text x="{ox + panel_size / 2:.0f}" y="{oy - 4}" text-anchor="middle">{p.title}</text>')
        out.append(f'<rect x="{ox}" y="{oy}" width="{panel_size}" height="{panel_size}" fill="none" stroke="#999"/>')
        if xs:
            x_lo, x_hi = min(xs), max(xs)
            y_lo, y_hi = min(ys), max(ys)
            span = max(x_hi - x_lo, y_hi - y_lo)
            if span == 0:
                span = 1.0
            # equal aspect: one scale for both axes, centered in the panel
            cx, cy = 0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)
            scale = (panel_size - 12) / span
            cv = p.color_by
            c_lo = min(cv) if cv is not None and len(cv) else 0.0
            c_hi = max(cv) if cv is not None and len(cv) else 1.0
            c_span = (c_hi - c_lo) or 1.0
            for i, (x, y) in enumerate(zip(xs, ys)):
                sx = ox + panel_size / 2 + (x - cx) * scale
                sy = oy + panel_size / 2 - (y - cy) * scale
                color = _cmap((cv[i] - c_lo) / c_span) if cv is not None and len(cv) else "#1f77b4"
                out.append(f'<circle cx="{_num(sx)}" cy="{_num(sy)}" r="{point_radius}" fill="{color}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_svg(path: str | Path, content: str) -> None:
    Path(path).write_text(content, encoding="utf-8")
