"""Player and puck kinematics.

A skater keeps their current velocity for the reaction time, then accelerates
toward any heading with linear drag ``dv/dt = gamma * (v_max * u - v)``.  The
set of positions reachable at time ``t`` is therefore a disk whose centre
drifts with the initial velocity and whose radius grows toward slope
``v_max``.  Goalies are additionally held inside a disk around the net.

The puck slides in a straight line under Stokes drag (rate ``kappa``) and a
constant friction deceleration ``mu_decel`` until it stops.

All array functions broadcast; the scalar helpers wrap them for one player.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import Config, PlayerState, Triplet

_BISECT_TOL = 1e-4
_N_SCAN = 16
_EPS = 1e-9


def _drift(tau, rate):
    """(1 - exp(-rate * tau)) / rate."""
    return -np.expm1(-rate * tau) / rate


def _drift_deficit(tau, rate):
    """(tau - (1 - exp(-rate*tau))/rate) / rate, stable as rate*tau -> 0."""
    tau = np.asarray(tau, dtype=float)
    x = rate * tau
    small = np.abs(x) < 1e-4
    series = tau * tau * (0.5 - x / 6.0 + x * x / 24.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (x + np.expm1(-x)) / (rate * rate)
    return np.where(small, series, direct)


# ---------------------------------------------------------------------------
# Players
# ---------------------------------------------------------------------------

def reach_params(px, py, vx, vy, t, cfg: Config):
    """Centre and radius of the reachable disk at time ``t`` (broadcasting)."""
    t = np.asarray(t, dtype=float)
    tau = np.maximum(t - cfg.t_reaction, 0.0)
    coast = np.minimum(t, cfg.t_reaction)
    drift = _drift(tau, cfg.gamma)
    shift = coast + drift
    cx = px + vx * shift
    cy = py + vy * shift
    radius = cfg.v_max * (tau - drift)
    return cx, cy, radius


def goalie_limit_radius(px, py, cfg: Config):
    # a goalie already outside the crease limit may stay where they are
    return np.maximum(cfg.goalie_radius, np.hypot(px - cfg.goal_x, py - cfg.goal_y))


def _lens_distance(qx, qy, c1x, c1y, r1, c2x, c2y, r2):
    """Distance from q to the intersection of disks (c1, r1) and (c2, r2).

    When the disks do not meet, the distance to the point of disk 1 nearest
    disk 2 is returned instead.
    """
    inf = np.inf
    d1 = np.hypot(qx - c1x, qy - c1y)
    d2 = np.hypot(qx - c2x, qy - c2y)

    s1 = np.where(d1 > r1, r1 / np.where(d1 > 0, d1, 1.0), 1.0)
    p1x, p1y = c1x + (qx - c1x) * s1, c1y + (qy - c1y) * s1
    ok1 = np.hypot(p1x - c2x, p1y - c2y) <= r2 + _EPS
    best = np.where(ok1, np.maximum(d1 - r1, 0.0), inf)

    s2 = np.where(d2 > r2, r2 / np.where(d2 > 0, d2, 1.0), 1.0)
    p2x, p2y = c2x + (qx - c2x) * s2, c2y + (qy - c2y) * s2
    ok2 = np.hypot(p2x - c1x, p2y - c1y) <= r1 + _EPS
    best = np.minimum(best, np.where(ok2, np.maximum(d2 - r2, 0.0), inf))

    sep = np.hypot(c2x - c1x, c2y - c1y)
    safe = np.where(sep > 0, sep, 1.0)
    ux, uy = (c2x - c1x) / safe, (c2y - c1y) / safe
    cross = (sep > 0) & (sep <= r1 + r2) & (sep >= np.abs(r1 - r2))
    a = (r1 * r1 - r2 * r2 + sep * sep) / (2.0 * safe)
    h = np.sqrt(np.maximum(r1 * r1 - a * a, 0.0))
    bx, by = c1x + a * ux, c1y + a * uy
    for sign in (1.0, -1.0):
        kx, ky = bx - sign * h * uy, by + sign * h * ux
        best = np.where(cross, np.minimum(best, np.hypot(qx - kx, qy - ky)), best)

    empty = ~np.isfinite(best)
    if np.any(empty):
        fx, fy = c1x + r1 * ux, c1y + r1 * uy
        best = np.where(empty, np.hypot(qx - fx, qy - fy), best)
    return best


@dataclass(frozen=True, eq=False)
class PlayerArrays:
    """Column view of a group of players, ordered by player id."""

    ids: tuple[str, ...]
    px: np.ndarray
    py: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    goalie: np.ndarray
    sign: np.ndarray
    limit: np.ndarray

    @classmethod
    def from_players(cls, players: Sequence[PlayerState], cfg: Config) -> "PlayerArrays":
        ordered = sorted(players, key=lambda p: p.player_id)
        px = np.array([p.position[0] for p in ordered], dtype=float)
        py = np.array([p.position[1] for p in ordered], dtype=float)
        return cls(
            ids=tuple(p.player_id for p in ordered),
            px=px,
            py=py,
            vx=np.array([p.velocity[0] for p in ordered], dtype=float),
            vy=np.array([p.velocity[1] for p in ordered], dtype=float),
            goalie=np.array([p.is_goalie for p in ordered], dtype=bool),
            sign=np.array([p.team.label for p in ordered], dtype=float),
            limit=goalie_limit_radius(px, py, cfg),
        )

    def __len__(self) -> int:
        return len(self.ids)

    def subset(self, mask: np.ndarray) -> "PlayerArrays":
        idx = np.flatnonzero(mask)
        return PlayerArrays(
            ids=tuple(self.ids[i] for i in idx),
            px=self.px[idx], py=self.py[idx], vx=self.vx[idx], vy=self.vy[idx],
            goalie=self.goalie[idx], sign=self.sign[idx], limit=self.limit[idx],
        )


def pair_distance(px, py, vx, vy, goalie, limit, qx, qy, t, cfg: Config):
    """Closest approach of each player to each target by time ``t`` (broadcasting)."""
    cx, cy, r = reach_params(px, py, vx, vy, t, cfg)
    d = np.maximum(np.hypot(qx - cx, qy - cy) - r, 0.0)
    if np.any(goalie):
        shape = d.shape
        g = np.broadcast_to(goalie, shape)
        if g.any():
            def pick(a):
                return np.broadcast_to(a, shape)[g]
            d = np.array(d, copy=True)
            d[g] = _lens_distance(
                pick(qx), pick(qy), pick(cx), pick(cy), pick(r),
                cfg.goal_x, cfg.goal_y, pick(limit),
            )
    return d


def distances(players: PlayerArrays, qx, qy, t, cfg: Config) -> np.ndarray:
    """(N, M) minimal distances for N players to M targets at times ``t``."""
    qx = np.asarray(qx, dtype=float)[None, :]
    qy = np.asarray(qy, dtype=float)[None, :]
    t = np.asarray(t, dtype=float)
    if t.ndim == 1:
        t = t[None, :]
    return pair_distance(
        players.px[:, None], players.py[:, None], players.vx[:, None],
        players.vy[:, None], players.goalie[:, None], players.limit[:, None],
        qx, qy, t, cfg,
    )


def arrival_times(players: PlayerArrays, qx, qy, cfg: Config):
    """Earliest time each player can reach each target.

    Returns ``(times, capped)`` as (N, M) arrays; unreachable targets get
    ``t_max`` and ``capped = True``.

    The reachable disks are nested once the drift of their centre is slower
    than the growth of their radius, which happens by
    ``t_reaction + log(1 + |v|/v_max)/gamma``.  Before that a short scan
    brackets the first contact; after it the distance is monotone and a
    plain bisection applies.
    """
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    n, m = len(players), qx.size
    times = np.full((n, m), np.nan)
    capped = np.zeros((n, m), dtype=bool)
    if n == 0 or m == 0:
        return times, capped

    speed = np.hypot(players.vx, players.vy)
    t_mono = np.minimum(cfg.t_reaction + np.log1p(speed / cfg.v_max) / cfg.gamma, cfg.t_max)
    lo = np.zeros((n, m))
    hi = np.zeros((n, m))
    found = np.zeros((n, m), dtype=bool)
    bisect = np.zeros((n, m), dtype=bool)

    t_prev = None
    for k, frac in enumerate(np.linspace(0.0, 1.0, _N_SCAN)):
        tk = (t_mono * frac)[:, None]
        hit = (distances(players, qx, qy, tk, cfg) <= 0.0) & ~found
        if k == 0:
            times[hit] = 0.0
        else:
            lo[hit] = np.broadcast_to(t_prev, (n, m))[hit]
            hi[hit] = np.broadcast_to(tk, (n, m))[hit]
            bisect |= hit
        found |= hit
        t_prev = tk

    rest = ~found
    if rest.any():
        d_end = distances(players, qx, qy, np.full((n, 1), cfg.t_max), cfg)
        late = rest & (d_end <= 0.0)
        lo[late] = np.broadcast_to(t_mono[:, None], (n, m))[late]
        hi[late] = cfg.t_max
        bisect |= late
        capped = rest & ~late
        times[capped] = cfg.t_max

    if bisect.any():
        ii, jj = np.nonzero(bisect)
        a, b = lo[ii, jj], hi[ii, jj]
        args = (
            players.px[ii], players.py[ii], players.vx[ii], players.vy[ii],
            players.goalie[ii], players.limit[ii], qx[jj], qy[jj],
        )
        width = float(np.max(b - a)) if a.size else 0.0
        n_iter = max(1, math.ceil(math.log2(max(width, _BISECT_TOL) / _BISECT_TOL)) + 1)
        for _ in range(n_iter):
            mid = 0.5 * (a + b)
            inside = pair_distance(*args, mid, cfg) <= 0.0
            b = np.where(inside, mid, b)
            a = np.where(inside, a, mid)
        times[ii, jj] = b
    return times, capped


@dataclass(frozen=True)
class ReachableDisk:
    center: tuple[float, float]
    radius: float
    t: float
    # (x, y, radius) of the crease constraint for goalies
    limit: tuple[float, float, float] | None = None

    def distance(self, target: tuple[float, float]) -> float:
        qx, qy = target
        if self.limit is None:
            return max(0.0, math.hypot(qx - self.center[0], qy - self.center[1]) - self.radius)
        gx, gy, gr = self.limit
        return float(_lens_distance(
            np.float64(qx), np.float64(qy), np.float64(self.center[0]),
            np.float64(self.center[1]), np.float64(self.radius), gx, gy, np.float64(gr),
        ))

    def contains(self, target: tuple[float, float]) -> bool:
        return self.distance(target) <= 0.0


def player_position(state: PlayerState, phi: float, t: float, cfg: Config) -> tuple[float, float]:
    """Position after ``t`` seconds when accelerating toward heading ``phi``."""
    cx, cy, r = reach_params(*state.position, *state.velocity, t, cfg)
    return (float(cx + r * math.cos(phi)), float(cy + r * math.sin(phi)))


def reachable_disk(state: PlayerState, t: float, cfg: Config) -> ReachableDisk:
    cx, cy, r = reach_params(*state.position, *state.velocity, t, cfg)
    limit = None
    if state.is_goalie:
        limit = (cfg.goal_x, cfg.goal_y, float(goalie_limit_radius(*state.position, cfg)))
    return ReachableDisk((float(cx), float(cy)), float(r), float(t), limit)


def min_distance(state: PlayerState, target: tuple[float, float], t: float, cfg: Config) -> float:
    return reachable_disk(state, t, cfg).distance(target)


class ReachTime(NamedTuple):
    seconds: float
    capped: bool


def time_to_reach(state: PlayerState, target: tuple[float, float], cfg: Config) -> ReachTime:
    players = PlayerArrays.from_players([state], cfg)
    t, capped = arrival_times(players, [target[0]], [target[1]], cfg)
    return ReachTime(float(t[0, 0]), bool(capped[0, 0]))


# ---------------------------------------------------------------------------
# Puck
# ---------------------------------------------------------------------------

class PuckError(ValueError):
    pass


def puck_stop_time(speed: float, cfg: Config) -> float:
    return math.log1p(cfg.kappa * speed / cfg.mu_decel) / cfg.kappa


def puck_travel(speed, t, cfg: Config):
    """Distance travelled and remaining speed after ``t`` for launch speed ``speed``.

    Broadcasts over both arguments.  Position is frozen after the puck stops.
    """
    speed = np.asarray(speed, dtype=float)
    t = np.asarray(t, dtype=float)
    t_stop = np.log1p(cfg.kappa * speed / cfg.mu_decel) / cfg.kappa
    te = np.minimum(t, t_stop)
    e = _drift(te, cfg.kappa)
    dist = speed * e - cfg.mu_decel * _drift_deficit(te, cfg.kappa)
    remaining = np.maximum(speed * np.exp(-cfg.kappa * te) - cfg.mu_decel * e, 0.0)
    remaining = np.where(t >= t_stop, 0.0, remaining)
    return dist, remaining


def puck_state(p0: tuple[float, float], v0: tuple[float, float], t: float, cfg: Config):
    """Return ``((x, y), (vx, vy))`` of the puck ``t`` seconds after release."""
    speed = math.hypot(*v0)
    if speed == 0.0:
        raise PuckError("puck at rest has no trajectory")
    ux, uy = v0[0] / speed, v0[1] / speed
    dist, remaining = puck_travel(speed, t, cfg)
    dist, remaining = float(dist), float(remaining)
    return (p0[0] + ux * dist, p0[1] + uy * dist), (ux * remaining, uy * remaining)


TERMINATIONS = ("board", "stopped", "time_cap")


@dataclass(frozen=True, eq=False)
class PassTrajectory:
    angle: float
    speed: float
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    termination: str

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def triplets(self) -> list[Triplet]:
        return [Triplet(float(a), float(b), float(c)) for a, b, c in zip(self.x, self.y, self.t)]

    def to_list(self) -> list[list[float]]:
        return [[float(a), float(b), float(c)] for a, b, c in zip(self.x, self.y, self.t)]


def _sample_count(cfg: Config) -> int:
    return int(math.floor(cfg.t_max / cfg.dt + 1e-9)) + 1


def pass_trajectories(
    puck: tuple[float, float],
    angles: Sequence[float],
    speeds: Sequence[float],
    cfg: Config,
) -> list[PassTrajectory]:
    """Trajectories for every (angle, speed) pair, angle-major."""
    k = np.arange(_sample_count(cfg) + 1)
    times = k * cfg.dt
    out: list[PassTrajectory] = []
    profiles = {}
    for s in set(float(v) for v in speeds):
        if not s > 0:
            raise PuckError("puck at rest has no trajectory")
        profiles[s] = puck_travel(s, times, cfg)
    angles = np.asarray(angles, dtype=float)
    for a in angles:
        ux, uy = math.cos(a), math.sin(a)
        for s in speeds:
            dist, remaining = profiles[float(s)]
            x = puck[0] + ux * dist
            y = puck[1] + uy * dist
            off = (x < 0.0) | (x > cfg.rink_length) | (y < 0.0) | (y > cfg.rink_width)
            slow = remaining < cfg.puck_stop_speed
            late = times > cfg.t_max + 1e-9
            bad = off | slow | late
            stop = int(np.argmax(bad)) if bad.any() else times.size
            if stop < times.size and off[stop]:
                why = "board"
            elif stop < times.size and slow[stop]:
                why = "stopped"
            else:
                why = "time_cap"
            out.append(PassTrajectory(float(a), float(s), x[:stop], y[:stop], times[:stop], why))
    return out


def pass_trajectory(puck: tuple[float, float], speed: float, angle: float, cfg: Config) -> PassTrajectory:
    """Samples of one pass every ``dt`` until it hits the boards, stops or times out."""
    if not speed > 0:
        raise PuckError("puck at rest has no trajectory")
    return pass_trajectories(puck, [angle], [speed], cfg)[0]
