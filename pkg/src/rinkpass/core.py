"""Model configuration, rink geometry and the shared domain types.

Units throughout: feet, seconds, radians. Angles live in (-pi, pi].
The offence always attacks the right-hand goal at (goal_x, goal_y).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SnapshotError(ValueError):
    """A frame that cannot be evaluated (missing passer, one-sided, off-rink puck...)."""


SURVIVAL_MODES = ("all_players", "per_player")


@dataclass(frozen=True)
class Config:
    # player motion
    gamma: float = 1.3
    v_max: float = 35.5
    frame_rate: float = 30.0
    t_reaction: float = 0.189
    goalie_radius: float = 8.0
    # puck motion; mu_decel is mu * g expressed as a deceleration
    kappa: float = 0.05
    mu_decel: float = 3.217
    dt: float = 0.05
    d_alpha: float = 0.05
    puck_stop_speed: float = 1.0
    t_max: float = 5.0
    # rink control
    beta: float = 2.5
    tau_floor: float = 0.05
    rc_exclude_passer: bool = False
    # pick-up model
    reach: float = 6.5
    coverage_window: float = 0.1
    t_intercept_off: float = 0.189
    t_intercept_def: float = 0.289
    swap_intercept_constants: bool = False
    survival_mode: str = "all_players"
    # scoring surface
    ell_x: float = 2000.0
    ell_y: float = 500.0
    goal_x: float = 189.0
    goal_y: float = 42.5
    # rink
    rink_length: float = 200.0
    rink_width: float = 85.0
    blue_line_x: float = 125.0
    # play evaluation
    candidate_speeds: tuple[float, ...] = (45.0, 65.0, 85.0)
    actual_angle_window: float = 0.10
    actual_window_points: int = 9
    # ingestion
    velocity_clamp_factor: float = 1.5
    frame_match_tolerance: float = 1.0
    min_pass_speed: float = 20.0
    max_pass_speed: float = 120.0

    def __post_init__(self) -> None:
        # lists from JSON become tuples so the config stays hashable
        object.__setattr__(
            self, "candidate_speeds", tuple(float(s) for s in self.candidate_speeds)
        )

    @property
    def n_angles(self) -> int:
        return max(1, round(2.0 * math.pi / self.d_alpha))

    def intercept_constant(self, offence: bool) -> float:
        off, dfn = self.t_intercept_off, self.t_intercept_def
        if self.swap_intercept_constants:
            off, dfn = dfn, off
        return off if offence else dfn

    def replace(self, **changes: Any) -> "Config":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["candidate_speeds"] = list(self.candidate_speeds)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown config key {k!r}" for k in unknown])
        return validate_config(cls(**data))


_POSITIVE = (
    "gamma", "v_max", "frame_rate", "t_reaction", "goalie_radius", "kappa",
    "mu_decel", "dt", "d_alpha", "puck_stop_speed", "t_max", "tau_floor",
    "reach", "coverage_window", "t_intercept_off", "t_intercept_def",
    "ell_x", "ell_y", "rink_length", "rink_width", "actual_angle_window",
    "velocity_clamp_factor", "frame_match_tolerance", "min_pass_speed",
    "max_pass_speed",
)


def validate_config(cfg: Config) -> Config:
    """Return ``cfg`` unchanged if it is usable, else raise ConfigError naming every problem."""
    problems: list[str] = []
    for name in _POSITIVE:
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"{name} must be a number")
        elif not math.isfinite(value) or value <= 0:
            problems.append(f"{name} must be positive")
    if not (isinstance(cfg.beta, (int, float)) and math.isfinite(cfg.beta) and cfg.beta >= 0):
        problems.append("beta must be non-negative")
    if not problems:
        if cfg.dt > cfg.coverage_window:
            problems.append("dt must not exceed coverage_window")
        if cfg.d_alpha > 2.0 * math.pi:
            problems.append("d_alpha must not exceed 2*pi")
        if not (0.0 < cfg.goal_x < cfg.rink_length and 0.0 < cfg.goal_y < cfg.rink_width):
            problems.append("goal point (goal_x, goal_y) must lie inside the rink")
        if not (0.0 <= cfg.blue_line_x < cfg.rink_length):
            problems.append("blue_line_x must lie inside the rink")
        if cfg.min_pass_speed >= cfg.max_pass_speed:
            problems.append("min_pass_speed must be below max_pass_speed")
    if not cfg.candidate_speeds:
        problems.append("candidate_speeds must not be empty")
    elif any(not math.isfinite(s) or s <= 0 for s in cfg.candidate_speeds):
        problems.append("candidate_speeds must all be positive")
    if cfg.survival_mode not in SURVIVAL_MODES:
        problems.append(f"survival_mode must be one of {SURVIVAL_MODES}")
    if cfg.actual_window_points < 1:
        problems.append("actual_window_points must be at least 1")
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path: str | Path | None = None) -> Config:
    """Load a flat JSON config; absent keys take defaults, unknown keys are an error."""
    if path is None:
        return validate_config(Config())
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError(["config file must hold a JSON object"])
    return Config.from_dict(data)


class Team(str, Enum):
    OFFENCE = "offence"
    DEFENCE = "defence"

    @property
    def label(self) -> int:
        return 1 if self is Team.OFFENCE else -1


@dataclass(frozen=True)
class PlayerState:
    player_id: str
    team: Team
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    is_goalie: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "team", Team(self.team))
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "velocity", (float(self.velocity[0]), float(self.velocity[1])))

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)

    def to_dict(self) -> dict[str, Any]:
        return {
            "player_id": self.player_id,
            "team": self.team.value,
            "position": list(self.position),
            "velocity": list(self.velocity),
            "is_goalie": self.is_goalie,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PlayerState":
        return cls(
            player_id=str(d["player_id"]),
            team=Team(d["team"]),
            position=tuple(d["position"]),
            velocity=tuple(d.get("velocity", (0.0, 0.0))),
            is_goalie=bool(d.get("is_goalie", False)),
        )


@dataclass(frozen=True)
class Snapshot:
    """Everything needed to evaluate passes from one frame."""

    players: tuple[PlayerState, ...]
    puck: tuple[float, float]
    passer_id: str
    frame_time: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "puck", (float(self.puck[0]), float(self.puck[1])))

    @property
    def passer(self) -> PlayerState:
        for p in self.players:
            if p.player_id == self.passer_id:
                return p
        raise SnapshotError(f"passer {self.passer_id!r} not in snapshot")

    def team_counts(self) -> dict[Team, int]:
        counts = {Team.OFFENCE: 0, Team.DEFENCE: 0}
        for p in self.players:
            counts[p.team] += 1
        return counts

    def with_labels_swapped(self) -> "Snapshot":
        flipped = tuple(
            dataclasses.replace(
                p, team=Team.DEFENCE if p.team is Team.OFFENCE else Team.OFFENCE
            )
            for p in self.players
        )
        return dataclasses.replace(self, players=flipped)

    def to_dict(self) -> dict[str, Any]:
        return {
            "players": [p.to_dict() for p in self.players],
            "puck": list(self.puck),
            "passer_id": self.passer_id,
            "frame_time": self.frame_time,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Snapshot":
        return cls(
            players=tuple(PlayerState.from_dict(p) for p in d["players"]),
            puck=tuple(d["puck"]),
            passer_id=str(d["passer_id"]),
            frame_time=float(d.get("frame_time", 0.0)),
        )


def inside_rink(x: float, y: float, cfg: Config) -> bool:
    return 0.0 <= x <= cfg.rink_length and 0.0 <= y <= cfg.rink_width


def check_snapshot(snap: Snapshot, cfg: Config, min_per_team: int = 2) -> Snapshot:
    """Raise SnapshotError unless the frame satisfies the evaluation preconditions."""
    matches = [p for p in snap.players if p.player_id == snap.passer_id]
    if len(matches) != 1:
        raise SnapshotError(
            f"expected exactly one passer {snap.passer_id!r}, found {len(matches)}"
        )
    ids = [p.player_id for p in snap.players]
    if len(set(ids)) != len(ids):
        raise SnapshotError("duplicate player ids")
    counts = snap.team_counts()
    if min(counts.values()) < min_per_team:
        raise SnapshotError(
            f"need {min_per_team} players per team, have "
            f"{counts[Team.OFFENCE]} offence / {counts[Team.DEFENCE]} defence"
        )
    if not inside_rink(*snap.puck, cfg):
        raise SnapshotError(f"puck {snap.puck} outside the rink")
    for p in snap.players:
        if not all(math.isfinite(v) for v in (*p.position, *p.velocity)):
            raise SnapshotError(f"non-finite state for player {p.player_id!r}")
    return snap


@dataclass(frozen=True)
class Triplet:
    x: float
    y: float
    t: float


def mirror_to_right_half(point: tuple[float, float], cfg: Config | None = None) -> tuple[float, float]:
    """Rotate a point 180 degrees about centre ice."""
    cfg = cfg or Config()
    return (cfg.rink_length - point[0], cfg.rink_width - point[1])


def wrap_angle(a: float) -> float:
    """Map an angle into (-pi, pi]."""
    a = math.remainder(a, 2.0 * math.pi)
    return math.pi if a == -math.pi else a


def angle_grid(cfg: Config) -> list[float]:
    """Evenly spaced angles over (-pi, pi], ending exactly at pi."""
    n = cfg.n_angles
    step = 2.0 * math.pi / n
    grid = [-math.pi + step * (k + 1) for k in range(n)]
    grid[-1] = math.pi
    return grid


__all__ = [
    "Config", "ConfigError", "PlayerState", "Snapshot", "SnapshotError", "Team",
    "Triplet", "angle_grid", "check_snapshot", "inside_rink", "load_config",
    "mirror_to_right_half", "validate_config", "wrap_angle",
]
