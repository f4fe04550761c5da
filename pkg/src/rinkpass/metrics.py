"""Pass values and whole-play evaluation.

For every candidate pass (angle x speed) the per-sample location value is
weighted by the offence's pick-up chance, either conditional on the puck
getting there (best case) or including the risk of an earlier interception
(expected).  A play is scored against the best option available at the
moment of the pass, holding the puck included.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .control import control_at
from .core import Config, Snapshot, Triplet, angle_grid, check_snapshot, wrap_angle
from .ingestion import PassPlay
from .motion import pass_trajectories
from .passing import Prepared, TrajectoryBatch, evaluate_trajectories
from .scoring import location_value, scoring_probability


def conditional_location_value(snapshot: Snapshot, triplet: Triplet, p_off_given_arrival: float,
                               cfg: Config) -> float:
    return location_value(snapshot, triplet, cfg) * p_off_given_arrival


def location_pass_value(snapshot: Snapshot, triplet: Triplet, p_off: float, cfg: Config) -> float:
    return location_value(snapshot, triplet, cfg) * p_off


def best_case_pass_value(clv: Iterable[float]) -> float:
    """Largest conditional location value along one pass; 0 for an empty pass."""
    values = np.asarray(list(clv), dtype=float)
    return float(values.max()) if values.size else 0.0


def expected_pass_value(lpv: Iterable[float]) -> float:
    """Sum of location pass values along one pass; 0 for an empty pass."""
    return math.fsum(float(v) for v in lpv)


@dataclass(frozen=True, eq=False)
class PassSurface:
    """Metrics over the angle x speed grid; arrays are indexed ``[angle, speed]``."""

    angles: np.ndarray
    speeds: np.ndarray
    success: np.ndarray
    best_case: np.ndarray
    expected: np.ndarray
    n_triplets: np.ndarray
    batch: TrajectoryBatch

    @property
    def empty(self) -> np.ndarray:
        return self.n_triplets == 0

    def trajectory_index(self, i_angle: int, i_speed: int) -> int:
        return i_angle * len(self.speeds) + i_speed

    def slice(self, i_angle: int, i_speed: int) -> dict[str, np.ndarray]:
        k = self.trajectory_index(i_angle, i_speed)
        a, b = self.batch.offsets[k], self.batch.offsets[k + 1]
        return {
            "x": self.batch.x[a:b], "y": self.batch.y[a:b], "t": self.batch.t[a:b],
            "clv": self.batch.clv[a:b], "lpv": self.batch.lpv[a:b],
        }

    def to_csv(self, digits: int = 8) -> str:
        buf = io.StringIO()
        buf.write("angle,speed,success,best_case,expected\n")
        for i, a in enumerate(self.angles):
            for j, s in enumerate(self.speeds):
                buf.write(
                    f"{a:.6f},{s:.4f},{self.success[i, j]:.{digits}f},"
                    f"{self.best_case[i, j]:.{digits}f},{self.expected[i, j]:.{digits}f}\n"
                )
        return buf.getvalue()


def pass_surface(snapshot: Snapshot, speeds: Iterable[float], cfg: Config,
                 angles: Iterable[float] | None = None) -> PassSurface:
    angles = np.array(angle_grid(cfg) if angles is None else list(angles), dtype=float)
    speeds = np.array(list(speeds), dtype=float)
    trajs = pass_trajectories(snapshot.puck, angles, speeds, cfg)
    batch = evaluate_trajectories(snapshot, trajs, cfg)
    return _surface_from(batch, angles, speeds, 0)


def _surface_from(batch: TrajectoryBatch, angles, speeds, start: int) -> PassSurface:
    shape = (len(angles), len(speeds))
    stop = start + shape[0] * shape[1]
    return PassSurface(
        angles=angles,
        speeds=speeds,
        success=batch.success[start:stop].reshape(shape),
        best_case=batch.best_case[start:stop].reshape(shape),
        expected=batch.expected[start:stop].reshape(shape),
        n_triplets=batch.lengths[start:stop].reshape(shape),
        batch=batch,
    )


@dataclass(frozen=True, eq=False)
class PlayEvaluation:
    key: str
    passer_id: str
    completed: bool
    actual_angle: float
    actual_speed: float
    no_pass_value: float
    actual_value: float
    best_outcome: float
    relative_outcome: float
    best_choice: str  # "pass" or "no_pass"
    best_angle: float | None
    best_speed: float | None
    actual_eval_angle: float
    actual_success: float
    actual_best_case: float
    surface: PassSurface | None = None

    def to_dict(self, include_surface: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "key": self.key,
            "passer_id": self.passer_id,
            "completed": self.completed,
            "actual_angle": self.actual_angle,
            "actual_speed": self.actual_speed,
            "no_pass_value": self.no_pass_value,
            "actual_value": self.actual_value,
            "best_outcome": self.best_outcome,
            "relative_outcome": self.relative_outcome,
            "best_choice": self.best_choice,
            "best_angle": self.best_angle,
            "best_speed": self.best_speed,
            "actual_eval_angle": self.actual_eval_angle,
            "actual_success": self.actual_success,
            "actual_best_case": self.actual_best_case,
        }
        if include_surface and self.surface is not None:
            s = self.surface
            out["surface"] = {
                "angles": s.angles.tolist(),
                "speeds": s.speeds.tolist(),
                "success": s.success.tolist(),
                "best_case": s.best_case.tolist(),
                "expected": s.expected.tolist(),
            }
        return out


def actual_window(play: PassPlay, cfg: Config) -> np.ndarray:
    """Evenly spaced angles across the tolerance window, centred on the recorded direction."""
    half = cfg.actual_angle_window
    raw = np.linspace(play.actual_angle - half, play.actual_angle + half, cfg.actual_window_points)
    if cfg.actual_window_points % 2 == 1:
        raw[cfg.actual_window_points // 2] = play.actual_angle
    return np.array([wrap_angle(a) for a in raw])


def no_pass_value(snapshot: Snapshot, cfg: Config, prepared: Prepared | None = None) -> float:
    """Location value of keeping the puck where the passer stands."""
    x, y = snapshot.passer.position
    players = prepared.control if prepared is not None else None
    rc = control_at(snapshot, [x], [y], [0.0], cfg, players=players)[0]
    return float(scoring_probability(x, y, cfg) * rc)


def evaluate_play(play: PassPlay, cfg: Config, keep_surface: bool = True) -> PlayEvaluation:
    snap = check_snapshot(play.snapshot, cfg)
    angles = np.array(angle_grid(cfg))
    speeds = np.array([*cfg.candidate_speeds, play.actual_speed], dtype=float)
    window = actual_window(play, cfg)

    trajs = pass_trajectories(snap.puck, angles, speeds, cfg)
    trajs += pass_trajectories(snap.puck, window, [play.actual_speed], cfg)
    prep = Prepared.build(snap, cfg)
    batch = evaluate_trajectories(snap, trajs, cfg, prepared=prep)
    surface = _surface_from(batch, angles, speeds, 0)

    n_grid = len(angles) * len(speeds)
    win_expected = batch.expected[n_grid:]
    win_best = int(np.argmax(win_expected))
    actual_value = float(win_expected[win_best])
    k_actual = n_grid + win_best

    hold = no_pass_value(snap, cfg, prep)
    flat = int(np.argmax(surface.expected))
    i_a, i_s = divmod(flat, len(speeds))
    grid_best = float(surface.expected[i_a, i_s])

    best_angle, best_speed, best = float(angles[i_a]), float(speeds[i_s]), grid_best
    if actual_value > best:
        best_angle, best_speed, best = float(window[win_best]), float(play.actual_speed), actual_value
    choice = "pass"
    if hold > best:
        best, choice, best_angle, best_speed = hold, "no_pass", None, None

    return PlayEvaluation(
        key=play.key,
        passer_id=play.passer_id,
        completed=play.completed,
        actual_angle=float(play.actual_angle),
        actual_speed=float(play.actual_speed),
        no_pass_value=hold,
        actual_value=actual_value,
        best_outcome=best,
        relative_outcome=actual_value / best if best > 0 else 0.0,
        best_choice=choice,
        best_angle=best_angle,
        best_speed=best_speed,
        actual_eval_angle=float(window[win_best]),
        actual_success=float(batch.success[k_actual]),
        actual_best_case=float(batch.best_case[k_actual]),
        surface=surface if keep_surface else None,
    )
