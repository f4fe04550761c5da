"""Shot-quality surface and location value."""

from __future__ import annotations

import numpy as np

from .control import control_at, grid_axes
from .core import Config, Snapshot, Triplet


def raw_scoring_probability(x, y, cfg: Config):
    """Squared-exponential decay away from the goal centre."""
    dx = np.asarray(x, dtype=float) - cfg.goal_x
    dy = np.asarray(y, dtype=float) - cfg.goal_y
    out = np.exp(-(dx * dx / cfg.ell_x + dy * dy / cfg.ell_y))
    return float(out) if out.ndim == 0 else out


def scoring_probability(x, y, cfg: Config):
    """Distance decay scaled by shooting angle, halved again behind the goal line.

    ``sin(theta)`` is the sine of the angle between the goal line and the line
    to the goal centre: 1 straight out from the net, 0 along the goal line.
    It is taken as 1 at the goal centre itself.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - cfg.goal_x
    dist = np.hypot(dx, y - cfg.goal_y)
    sin_theta = np.where(dist > 0, np.abs(dx) / np.where(dist > 0, dist, 1.0), 1.0)
    scale = np.where(x < cfg.goal_x, 4.0, 8.0)
    out = np.asarray(raw_scoring_probability(x, y, cfg)) * (sin_theta + 1.0) / scale
    return float(out) if out.ndim == 0 else out


def location_value(snapshot: Snapshot, triplet: Triplet, cfg: Config) -> float:
    rc = control_at(snapshot, [triplet.x], [triplet.y], [triplet.t], cfg)[0]
    return float(scoring_probability(triplet.x, triplet.y, cfg) * rc)


def scoring_grid(resolution: float, cfg: Config):
    xs, ys, _, _ = grid_axes(resolution, cfg)
    gx, gy = np.meshgrid(xs, ys)
    return xs, ys, scoring_probability(gx, gy, cfg)


def location_value_grid(snapshot: Snapshot, resolution: float, t: float, cfg: Config):
    xs, ys, _, _ = grid_axes(resolution, cfg)
    gx, gy = np.meshgrid(xs, ys)
    rc = control_at(snapshot, gx.ravel(), gy.ravel(), t, cfg).reshape(gx.shape)
    return xs, ys, scoring_probability(gx, gy, cfg) * rc
