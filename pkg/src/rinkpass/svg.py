"""Self-contained SVG figures: rink heatmaps, polar pass maps, player scatters.

Colour scale is fixed over the normalised value range: 0 is red, 0.5 white,
1 blue.  For rink control red is therefore the defence-controlled end.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .analysis import PlayerSummary
from .core import Config, Snapshot, Team

SCALE = 4.0  # pixels per foot
_RED = (178, 24, 43)
_WHITE = (247, 247, 247)
_BLUE = (33, 102, 172)


def color(value: float, vmin: float = 0.0, vmax: float = 1.0) -> str:
    span = vmax - vmin
    u = 0.5 if span <= 0 or not math.isfinite(value) else (value - vmin) / span
    u = min(max(u, 0.0), 1.0)
    if u < 0.5:
        lo, hi, f = _RED, _WHITE, u / 0.5
    else:
        lo, hi, f = _WHITE, _BLUE, (u - 0.5) / 0.5
    rgb = tuple(round(a + (b - a) * f) for a, b in zip(lo, hi))
    return "#%02x%02x%02x" % rgb


def _f(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    def __init__(self, cfg: Config, title: str):
        self.cfg = cfg
        self.width = cfg.rink_length * SCALE
        self.height = cfg.rink_width * SCALE
        self.parts: list[str] = []
        self.title = title

    def px(self, x: float, y: float) -> tuple[str, str]:
        # SVG y grows downward
        return _f(x * SCALE), _f((self.cfg.rink_width - y) * SCALE)

    def add(self, s: str) -> None:
        self.parts.append(s)

    def rink_lines(self) -> None:
        c = self.cfg
        w, h = self.width, self.height
        r = 28.0 * SCALE
        self.add(f'<rect x="0" y="0" width="{_f(w)}" height="{_f(h)}" rx="{_f(r)}" '
                 f'fill="none" stroke="#222222" stroke-width="3"/>')
        for x, col in ((c.rink_length / 2, "#c0392b"), (c.rink_length - c.blue_line_x, "#1f4e9a"),
                       (c.blue_line_x, "#1f4e9a"), (c.rink_length - c.goal_x, "#c0392b"),
                       (c.goal_x, "#c0392b")):
            x0, y0 = self.px(x, 0)
            x1, y1 = self.px(x, c.rink_width)
            self.add(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="{col}" stroke-width="2"/>')
        gx, gy = self.px(c.goal_x, c.goal_y)
        self.add(f'<circle cx="{gx}" cy="{gy}" r="{_f(6 * SCALE)}" fill="none" stroke="#c0392b" stroke-width="1.5"/>')

    def players(self, snap: Snapshot) -> None:
        for p in snap.players:
            cx, cy = self.px(*p.position)
            fill = "#1f4e9a" if p.team is Team.OFFENCE else "#b2182b"
            stroke = "#f1c40f" if p.player_id == snap.passer_id else "#000000"
            vx, vy = p.velocity
            ex, ey = self.px(p.position[0] + vx * 0.5, p.position[1] + vy * 0.5)
            self.add(f'<line x1="{cx}" y1="{cy}" x2="{ex}" y2="{ey}" stroke="#000000" stroke-width="1.5"/>')
            shape = "rect" if p.is_goalie else "circle"
            if shape == "rect":
                s = 2.5 * SCALE
                self.add(f'<rect x="{_f(float(cx) - s / 2)}" y="{_f(float(cy) - s / 2)}" width="{_f(s)}" '
                         f'height="{_f(s)}" fill="{fill}" stroke="{stroke}" stroke-width="2"/>')
            else:
                self.add(f'<circle cx="{cx}" cy="{cy}" r="{_f(1.5 * SCALE)}" fill="{fill}" '
                         f'stroke="{stroke}" stroke-width="2"/>')
        x, y = self.px(*snap.puck)
        self.add(f'<circle cx="{x}" cy="{y}" r="{_f(0.8 * SCALE)}" fill="#000000"/>')

    def render(self) -> str:
        pad = 30
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" '
            f'height="{_f(self.height + pad)}" viewBox="0 {-pad} {_f(self.width)} {_f(self.height + pad)}">\n'
            f'<text x="4" y="-10" font-family="sans-serif" font-size="14">{self.title}</text>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def heatmap_svg(xs: np.ndarray, ys: np.ndarray, values: np.ndarray, cfg: Config, title: str,
                vmin: float = 0.0, vmax: float = 1.0, snapshot: Snapshot | None = None) -> str:
    canvas = _Canvas(cfg, title)
    dx = float(xs[1] - xs[0]) if len(xs) > 1 else cfg.rink_length
    dy = float(ys[1] - ys[0]) if len(ys) > 1 else cfg.rink_width
    for r, y in enumerate(ys):
        for c, x in enumerate(xs):
            x0, y0 = canvas.px(x - dx / 2, y + dy / 2)
            canvas.add(f'<rect x="{x0}" y="{y0}" width="{_f(dx * SCALE)}" height="{_f(dy * SCALE)}" '
                       f'fill="{color(float(values[r, c]), vmin, vmax)}"/>')
    canvas.rink_lines()
    if snapshot is not None:
        canvas.players(snapshot)
    return canvas.render()


def polar_svg(angles: Sequence[float], values: Sequence[float], snapshot: Snapshot, cfg: Config,
              title: str, vmax: float | None = None, length: float = 40.0) -> str:
    """Wedges fanned around the puck, one per angle, coloured and sized by value."""
    canvas = _Canvas(cfg, title)
    canvas.rink_lines()
    values = np.asarray(values, dtype=float)
    top = float(vmax if vmax is not None else (values.max() if values.size else 1.0)) or 1.0
    angles = np.asarray(angles, dtype=float)
    half = math.pi / max(len(angles), 1)
    px, py = snapshot.puck
    for a, v in zip(angles, values):
        r = 4.0 + length * min(max(v / top, 0.0), 1.0)
        pts = [canvas.px(px, py)]
        for b in (a - half, a + half):
            pts.append(canvas.px(px + r * math.cos(b), py + r * math.sin(b)))
        path = " ".join(f"{x},{y}" for x, y in pts)
        canvas.add(f'<polygon points="{path}" fill="{color(v, 0.0, top)}" stroke="#555555" stroke-width="0.3"/>')
    canvas.players(snapshot)
    return canvas.render()


def summary_svg(decision: list[PlayerSummary], outcome: list[PlayerSummary]) -> str:
    """Two scatter panels with median-split quadrant shading."""
    w, h, m = 360.0, 300.0, 40.0
    panels = [
        ("Decision making", "avg success probability", "avg best case value", decision,
         lambda s: (s.avg_success_probability, s.avg_best_case_value),
         ("#f9e79f", "#a9dfbf", "#f5b7b1", "#d7bde2")),
        ("Outcomes", "avg best outcome", "avg relative outcome", outcome,
         lambda s: (s.avg_best_outcome, s.avg_relative_outcome),
         ("#eeeeee", "#eeeeee", "#eeeeee", "#eeeeee")),
    ]
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(2 * w)}" height="{_f(h)}" viewBox="0 0 {_f(2 * w)} {_f(h)}">',
    ]
    for k, (title, xl, yl, rows, get, shades) in enumerate(panels):
        ox = k * w
        pts = [get(s) for s in rows]
        xs = [p[0] for p in pts] or [0.0]
        ys = [p[1] for p in pts] or [0.0]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        x_span = (x_hi - x_lo) or 1.0
        y_span = (y_hi - y_lo) or 1.0
        x_lo, x_hi = x_lo - 0.1 * x_span, x_hi + 0.1 * x_span
        y_lo, y_hi = y_lo - 0.1 * y_span, y_hi + 0.1 * y_span

        def sx(v: float) -> float:
            return ox + m + (v - x_lo) / (x_hi - x_lo) * (w - 2 * m)

        def sy(v: float) -> float:
            return h - m - (v - y_lo) / (y_hi - y_lo) * (h - 2 * m)

        mx = sx(float(np.median(xs))) if rows else sx((x_lo + x_hi) / 2)
        my = sy(float(np.median(ys))) if rows else sy((y_lo + y_hi) / 2)
        left, right, top, bottom = ox + m, ox + w - m, m, h - m
        # bottom-right, top-right, bottom-left, top-left
        boxes = ((mx, my, right, bottom), (mx, top, right, my), (left, my, mx, bottom), (left, top, mx, my))
        for (x0, y0, x1, y1), fill in zip(boxes, shades):
            parts.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" fill="{fill}"/>')
        parts.append(f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(right - left)}" height="{_f(bottom - top)}" '
                     'fill="none" stroke="#333333"/>')
        parts.append(f'<text x="{_f(ox + m)}" y="20" font-family="sans-serif" font-size="14">{title}</text>')
        parts.append(f'<text x="{_f(ox + w / 2)}" y="{_f(h - 8)}" font-family="sans-serif" font-size="11" '
                     f'text-anchor="middle">{xl}</text>')
        parts.append(f'<text x="{_f(ox + 12)}" y="{_f(h / 2)}" font-family="sans-serif" font-size="11" '
                     f'transform="rotate(-90 {_f(ox + 12)} {_f(h / 2)})" text-anchor="middle">{yl}</text>')
        for s, (x, y) in zip(rows, pts):
            parts.append(f'<circle cx="{_f(sx(x))}" cy="{_f(sy(y))}" r="4" fill="#1f4e9a"/>')
            parts.append(f'<text x="{_f(sx(x) + 5)}" y="{_f(sy(y) - 5)}" font-family="sans-serif" '
                         f'font-size="9">{s.player_id}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
