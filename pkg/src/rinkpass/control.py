"""Rink control: how strongly the offence owns a point when the puck gets there."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import Config, Snapshot, Triplet
from .motion import PlayerArrays, arrival_times


def control_from_arrivals(arrive: np.ndarray, sign: np.ndarray, t_puck, cfg: Config) -> np.ndarray:
    """Rink control from an (N, M) matrix of player arrival times.

    Each player's weight is ``tau ** -beta`` with ``tau`` the lag between the
    player's arrival and the puck's, floored at ``tau_floor``.  Weights are
    normalised in log space so large ``beta`` cannot overflow.
    """
    tau = np.maximum(arrive - np.asarray(t_puck, dtype=float)[None, ...], cfg.tau_floor)
    if cfg.beta == 0:
        w = np.ones_like(tau)
    else:
        logw = -cfg.beta * np.log(tau)
        w = np.exp(logw - logw.max(axis=0, keepdims=True))
    balance = (sign[:, None] * w).sum(axis=0) / w.sum(axis=0)
    return (balance + 1.0) / 2.0


def _control_players(snapshot: Snapshot, cfg: Config) -> PlayerArrays:
    players = snapshot.players
    if cfg.rc_exclude_passer:
        players = [p for p in players if p.player_id != snapshot.passer_id]
    return PlayerArrays.from_players(players, cfg)


def control_at(snapshot: Snapshot, x, y, t, cfg: Config, players: PlayerArrays | None = None) -> np.ndarray:
    """Vectorised rink control at points ``(x, y)`` with puck arrival times ``t``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape)
    if players is None:
        players = _control_players(snapshot, cfg)
    if len(players) == 0:
        return np.full(x.shape, 0.5)
    arrive, _ = arrival_times(players, x, y, cfg)
    return control_from_arrivals(arrive, players.sign, t, cfg)


def rink_control(snapshot: Snapshot, triplet: Triplet, cfg: Config) -> float:
    return float(control_at(snapshot, [triplet.x], [triplet.y], [triplet.t], cfg)[0])


@dataclass(frozen=True, eq=False)
class ControlGrid:
    """Values sampled at cell centres; ``values[row, col]`` sits at ``(xs[col], ys[row])``."""

    dx: float
    dy: float
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    t: float

    def to_csv(self, fh=None, digits: int = 6) -> str:
        return grid_to_csv(self.xs, self.ys, self.values, fh, digits)


def grid_axes(resolution: float, cfg: Config):
    nx = max(1, round(cfg.rink_length / resolution))
    ny = max(1, round(cfg.rink_width / resolution))
    dx, dy = cfg.rink_length / nx, cfg.rink_width / ny
    xs = (np.arange(nx) + 0.5) * dx
    ys = (np.arange(ny) + 0.5) * dy
    return xs, ys, dx, dy


def grid_to_csv(xs, ys, values, fh=None, digits: int = 6) -> str:
    buf = io.StringIO()
    buf.write("x,y,value\n")
    for r, y in enumerate(ys):
        for c, x in enumerate(xs):
            buf.write(f"{x:.4f},{y:.4f},{values[r, c]:.{digits}f}\n")
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def control_grid(snapshot: Snapshot, resolution: float, t: float, cfg: Config) -> ControlGrid:
    """Rink control over the whole rink for a puck arriving at time ``t``."""
    xs, ys, dx, dy = grid_axes(resolution, cfg)
    gx, gy = np.meshgrid(xs, ys)
    values = control_at(snapshot, gx.ravel(), gy.ravel(), t, cfg).reshape(gx.shape)
    return ControlGrid(dx, dy, xs, ys, values, float(t))
