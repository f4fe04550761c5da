"""Pick-up probabilities along pass trajectories.

At every sample of a pass each player (other than the passer) is given a base
chance of collecting the puck, from how close they can get to it and how late
it arrives.  Players then take their chances in order of arrival, and the
pass only reaches a sample if nobody collected it at an earlier one.

Everything is computed for a batch of trajectories at once: the samples of
all trajectories are laid out end to end and ``offsets`` marks where each
trajectory starts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .control import control_from_arrivals
from .core import Config, Snapshot, Team, angle_grid
from .motion import PassTrajectory, PlayerArrays, arrival_times, distances, pass_trajectories
from .scoring import scoring_probability


def base_pickup(d, t, side: Team | str | bool, cfg: Config):
    """Chance a player ``d`` feet from the puck collects it ``t`` seconds into the pass.

    The reach window is a normal density of scale ``reach`` integrated over one
    reach either side of the player, decayed by the side's intercept constant
    and rescaled from the coverage window to one time step.
    """
    offence = side if isinstance(side, bool) else Team(side) is Team.OFFENCE
    s = cfg.reach
    d = np.asarray(d, dtype=float)
    t = np.asarray(t, dtype=float)
    out = (ndtr((d + s) / s) - ndtr((d - s) / s)) * np.exp(-t / cfg.intercept_constant(offence))
    out = out * (cfg.dt / cfg.coverage_window)
    return float(out) if out.ndim == 0 else out


def _ordered(bases: np.ndarray, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise arrival-order recursion.

    Rows must already be in tie-break order (player id).  Returns the
    conditional probabilities in the original row order and, per column, the
    chance that nobody collects the puck there.
    """
    order = np.argsort(dist, axis=0, kind="stable")
    b = np.take_along_axis(bases, order, axis=0)
    left = np.cumprod(1.0 - b, axis=0)
    before = np.vstack([np.ones((1, b.shape[1])), left[:-1]])
    cond = np.empty_like(bases)
    np.put_along_axis(cond, order, b * before, axis=0)
    return cond, left[-1] if len(b) else np.ones(bases.shape[1])


def ordered_pickup(bases: Sequence[float], dists: Sequence[float] | None = None,
                   ids: Sequence[str] | None = None) -> np.ndarray:
    """Conditional pick-up probabilities at one point.

    Players are ranked by distance (ties by id); without distances the bases
    are taken to be in arrival order already.  Results follow input order.
    """
    bases = np.asarray(bases, dtype=float)
    n = bases.size
    if n == 0:
        return bases.copy()
    dists = np.arange(n, dtype=float) if dists is None else np.asarray(dists, dtype=float)
    ids = list(range(n)) if ids is None else list(ids)
    tiebreak = sorted(range(n), key=lambda i: ids[i])
    cond, _ = _ordered(bases[tiebreak, None], dists[tiebreak, None])
    out = np.empty(n)
    out[tiebreak] = cond[:, 0]
    return out


def sequential_pickups(conditional, survival_mode: str = "all_players") -> tuple[np.ndarray, np.ndarray]:
    """Unconditional pick-ups for one pass from its (player, sample) conditionals.

    Returns ``(unconditional, survival)`` where ``survival`` has one entry per
    sample plus a final one for the puck never being collected.  In
    ``all_players`` mode anyone's earlier pick-up stops the pass; in
    ``per_player`` mode only the player's own earlier pick-ups count.
    """
    cond = np.atleast_2d(np.asarray(conditional, dtype=float))
    n, m = cond.shape
    if survival_mode == "per_player":
        own = np.cumprod(1.0 - cond, axis=1)
        uncond = cond * np.hstack([np.ones((n, 1)), own[:, :-1]])
        taken = np.concatenate([[0.0], np.cumsum(uncond.sum(axis=0))])
        return uncond, 1.0 - taken
    survival = np.ones(m + 1)
    for j in range(m):
        survival[j + 1] = survival[j] - survival[j] * cond[:, j].sum()
    return cond * survival[None, :-1], survival


class _Segments:
    """Maps flat per-sample arrays to a padded (trajectory, sample) layout."""

    def __init__(self, offsets: np.ndarray):
        self.offsets = offsets
        self.lengths = np.diff(offsets)
        width = int(self.lengths.max()) if self.lengths.size else 0
        self.width = max(width, 1)
        col = np.arange(self.width)
        self.mask = col[None, :] < self.lengths[:, None]
        self.index = np.where(self.mask, offsets[:-1, None] + col[None, :], 0)

    def pad(self, flat: np.ndarray, fill: float) -> np.ndarray:
        if flat.size == 0:
            return np.full(self.mask.shape, fill)
        return np.where(self.mask, flat[..., self.index], fill)

    def unpad(self, padded: np.ndarray) -> np.ndarray:
        return padded[..., self.mask]

    def total(self, flat: np.ndarray) -> np.ndarray:
        return self.pad(flat, 0.0).sum(axis=-1)

    def maximum(self, flat: np.ndarray) -> np.ndarray:
        return self.pad(flat, 0.0).max(axis=-1)


@dataclass(frozen=True, eq=False)
class Prepared:
    """Per-snapshot arrays shared by every trajectory evaluated on it."""

    snapshot: Snapshot
    control: PlayerArrays
    pickup: PlayerArrays

    @classmethod
    def build(cls, snapshot: Snapshot, cfg: Config) -> "Prepared":
        everyone = PlayerArrays.from_players(snapshot.players, cfg)
        not_passer = np.array([pid != snapshot.passer_id for pid in everyone.ids])
        control = everyone.subset(not_passer) if cfg.rc_exclude_passer else everyone
        return cls(snapshot, control, everyone.subset(not_passer))


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Per-sample and per-trajectory results for a batch of passes.

    Per-sample arrays are flat, trajectory ``k`` occupying
    ``offsets[k]:offsets[k+1]``.  Player-indexed arrays have one row per
    pick-up candidate in ``player_ids`` order (the passer is never one).
    """

    trajectories: list[PassTrajectory]
    offsets: np.ndarray
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray
    player_ids: tuple[str, ...]
    offence_rows: np.ndarray
    distance: np.ndarray
    base: np.ndarray
    conditional: np.ndarray
    unconditional: np.ndarray
    survival: np.ndarray
    residual: np.ndarray
    off_given_arrival: np.ndarray
    def_given_arrival: np.ndarray
    off: np.ndarray
    deff: np.ndarray
    control: np.ndarray
    scoring: np.ndarray

    @cached_property
    def location_value(self) -> np.ndarray:
        return self.scoring * self.control

    @cached_property
    def clv(self) -> np.ndarray:
        return self.location_value * self.off_given_arrival

    @cached_property
    def lpv(self) -> np.ndarray:
        return self.location_value * self.off

    @cached_property
    def _segments(self) -> _Segments:
        return _Segments(self.offsets)

    @cached_property
    def success(self) -> np.ndarray:
        return self._segments.total(self.off)

    @cached_property
    def best_case(self) -> np.ndarray:
        return self._segments.maximum(self.clv)

    @cached_property
    def expected(self) -> np.ndarray:
        return self._segments.total(self.lpv)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    def field(self, k: int) -> "PickupField":
        a, b = int(self.offsets[k]), int(self.offsets[k + 1])
        surv = np.append(self.survival[a:b], self.residual[k])
        return PickupField(
            trajectory=self.trajectories[k],
            player_ids=self.player_ids,
            offence_rows=self.offence_rows,
            distance=self.distance[:, a:b],
            base=self.base[:, a:b],
            conditional=self.conditional[:, a:b],
            unconditional=self.unconditional[:, a:b],
            survival=surv,
            off_given_arrival=self.off_given_arrival[a:b],
            def_given_arrival=self.def_given_arrival[a:b],
            off=self.off[a:b],
            deff=self.deff[a:b],
        )


@dataclass(frozen=True, eq=False)
class PickupField:
    """Pick-up probabilities for one pass.

    ``survival[j]`` is the chance the puck is still loose on arriving at
    sample ``j``; the extra final entry is the chance it is never collected.
    """

    trajectory: PassTrajectory
    player_ids: tuple[str, ...]
    offence_rows: np.ndarray
    distance: np.ndarray
    base: np.ndarray
    conditional: np.ndarray
    unconditional: np.ndarray
    survival: np.ndarray
    off_given_arrival: np.ndarray
    def_given_arrival: np.ndarray
    off: np.ndarray
    deff: np.ndarray

    def player_totals(self) -> dict[str, float]:
        return {pid: float(v) for pid, v in zip(self.player_ids, self.unconditional.sum(axis=1))}


def evaluate_trajectories(
    snapshot: Snapshot,
    trajectories: Sequence[PassTrajectory],
    cfg: Config,
    prepared: Prepared | None = None,
) -> TrajectoryBatch:
    prep = prepared or Prepared.build(snapshot, cfg)
    trajectories = list(trajectories)
    lengths = np.array([len(tr) for tr in trajectories], dtype=int)
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(int)
    x = np.concatenate([tr.x for tr in trajectories]) if trajectories else np.empty(0)
    y = np.concatenate([tr.y for tr in trajectories]) if trajectories else np.empty(0)
    t = np.concatenate([tr.t for tr in trajectories]) if trajectories else np.empty(0)
    m = x.size
    seg = _Segments(offsets)

    pick = prep.pickup
    offence_rows = pick.sign > 0
    n = len(pick)
    if n:
        dist = distances(pick, x, y, t, cfg)
        base = np.empty((n, m))
        base[offence_rows] = base_pickup(dist[offence_rows], t[None, :], True, cfg)
        base[~offence_rows] = base_pickup(dist[~offence_rows], t[None, :], False, cfg)
        cond, loose = _ordered(base, dist)
    else:
        dist = base = cond = np.zeros((0, m))
        loose = np.ones(m)

    if cfg.survival_mode == "per_player":
        # literal reading: only the player's own earlier pick-ups block them
        left = np.cumprod(seg.pad(1.0 - cond, 1.0), axis=-1)
        before = np.concatenate([np.ones(left.shape[:-1] + (1,)), left[..., :-1]], axis=-1)
        uncond = cond * seg.unpad(before)
        taken = seg.pad(uncond.sum(axis=0), 0.0).cumsum(axis=-1)
        survival = seg.unpad(1.0 - np.concatenate([np.zeros((len(lengths), 1)), taken[:, :-1]], axis=1))
        residual = 1.0 - taken[:, -1] if m else np.ones(len(lengths))
    else:
        left = np.cumprod(seg.pad(loose, 1.0), axis=-1)
        before = np.concatenate([np.ones((left.shape[0], 1)), left[:, :-1]], axis=1)
        survival = seg.unpad(before)
        uncond = cond * survival[None, :]
        residual = left[:, -1]

    rc_arrive, _ = arrival_times(prep.control, x, y, cfg)
    control = (
        control_from_arrivals(rc_arrive, prep.control.sign, t, cfg)
        if len(prep.control) else np.full(m, 0.5)
    )

    return TrajectoryBatch(
        trajectories=trajectories,
        offsets=offsets,
        x=x, y=y, t=t,
        player_ids=pick.ids,
        offence_rows=offence_rows,
        distance=dist,
        base=base,
        conditional=cond,
        unconditional=uncond,
        survival=survival,
        residual=residual,
        off_given_arrival=cond[offence_rows].sum(axis=0),
        def_given_arrival=cond[~offence_rows].sum(axis=0),
        off=uncond[offence_rows].sum(axis=0),
        deff=uncond[~offence_rows].sum(axis=0),
        control=control,
        scoring=np.asarray(scoring_probability(x, y, cfg), dtype=float).reshape(m),
    )


def trajectory_pickup(snapshot: Snapshot, trajectory: PassTrajectory, cfg: Config) -> PickupField:
    return evaluate_trajectories(snapshot, [trajectory], cfg).field(0)


def success_probability(snapshot: Snapshot, speed: float, angle: float, cfg: Config) -> float:
    """Chance an offensive player collects a pass of this speed and direction.

    A pass that reaches the boards untouched counts as a failure.
    """
    traj = pass_trajectories(snapshot.puck, [angle], [speed], cfg)
    return float(evaluate_trajectories(snapshot, traj, cfg).success[0])


def success_map(snapshot: Snapshot, speed: float, cfg: Config) -> tuple[np.ndarray, np.ndarray]:
    """``(angles, success)`` over the full angle grid for one pass speed."""
    angles = np.array(angle_grid(cfg))
    traj = pass_trajectories(snapshot.puck, angles, [speed], cfg)
    return angles, evaluate_trajectories(snapshot, traj, cfg).success
