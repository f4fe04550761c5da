"""Tracking/event CSV parsing and assembly of evaluable pass plays.

Tracking columns (canonical names; remap with ``columns=``):

=========  ========  ===================================================
column     required  meaning
=========  ========  ===================================================
game_id    no        game identifier (default ``"game"``)
period     yes       period number
frame_id   yes       frame counter, increasing by one per frame
clock      yes       seconds elapsed in the period
team       yes       team name, matching the event file
jersey     yes       jersey number
x, y       yes       position in feet, origin at the lower-left corner
goalie     no        1/true for goaltenders
=========  ========  ===================================================

Event columns:

=========  ========  ===================================================
game_id    no        game identifier
period     yes       period number
clock      yes       seconds elapsed in the period
team       yes       team of the acting player
player     yes       jersey number of the acting player
event      yes       ``Play`` (completed pass), ``Incomplete Play``, ...
x, y       yes       event location in feet
detail     no        ``Direct`` / ``Indirect`` for passes (default direct)
player_2   no        jersey number of the (intended) receiver
x2, y2     no        receiver location
clock_2    no        reception time; otherwise the next event's clock
=========  ========  ===================================================
"""

from __future__ import annotations

import bisect
import csv
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping

from .core import Config, PlayerState, Snapshot, Team, mirror_to_right_half, wrap_angle
from .motion import puck_travel

logger = logging.getLogger(__name__)

TRACKING_REQUIRED = ("period", "frame_id", "clock", "team", "jersey", "x", "y")
TRACKING_OPTIONAL = ("game_id", "goalie")
EVENT_REQUIRED = ("period", "clock", "team", "player", "event", "x", "y")
EVENT_OPTIONAL = ("game_id", "detail", "player_2", "x2", "y2", "clock_2")

PASS_EVENTS = {"Play": True, "Incomplete Play": False}

# Big Data Cup 2022 event export headers
BDC_EVENT_COLUMNS = {
    "period": "Period",
    "clock": "Clock",
    "team": "Team",
    "player": "Player",
    "event": "Event",
    "x": "X Coordinate",
    "y": "Y Coordinate",
    "detail": "Detail 1",
    "player_2": "Player 2",
    "x2": "X Coordinate 2",
    "y2": "Y Coordinate 2",
}

REJECT_REASONS = (
    "indirect_pass",
    "missing_receiver",
    "outside_offensive_zone",
    "zero_length_pass",
    "no_travel_time",
    "no_frame",
    "one_team_only",
    "too_few_players",
)


class IngestError(ValueError):
    """Input that cannot be read at all (no header, missing columns)."""


@dataclass(frozen=True)
class TrackingRecord:
    game_id: str
    period: int
    frame_id: int
    clock: float
    team_label: str
    jersey: str
    x: float
    y: float
    goalie_flag: bool | None = None

    @property
    def player_id(self) -> str:
        return player_key(self.team_label, self.jersey)


@dataclass(frozen=True)
class EventRecord:
    game_id: str
    event_type: str
    period: int
    clock: float
    team: str
    player: str
    x: float
    y: float
    detail: str | None = None
    player_2: str | None = None
    x2: float | None = None
    y2: float | None = None
    clock_2: float | None = None

    @property
    def is_pass(self) -> bool:
        return self.event_type in PASS_EVENTS


@dataclass
class ParsedTable:
    records: list
    skipped: list[tuple[int, str]] = field(default_factory=list)
    has_goalie_column: bool = False

    @property
    def warnings(self) -> int:
        return len(self.skipped)


def player_key(team: str, jersey: str) -> str:
    return f"{team}#{jersey}"


def _jersey(raw: str) -> str:
    raw = raw.strip()
    try:
        f = float(raw)
    except ValueError:
        return raw
    return str(int(f)) if f.is_integer() else raw


def _finite(raw: str | None) -> float:
    value = float(raw)  # type: ignore[arg-type]
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {raw!r}")
    return value


def _opt_float(raw: str | None) -> float | None:
    if raw is None or raw.strip() == "":
        return None
    return _finite(raw)


def _opt_str(raw: str | None) -> str | None:
    if raw is None or raw.strip() == "":
        return None
    return raw.strip()


def _flag(raw: str | None) -> bool | None:
    if raw is None or raw.strip() == "":
        return None
    return raw.strip().lower() in {"1", "true", "t", "yes", "y", "g"}


def _reader(stream: IO[str], required: Iterable[str], optional: Iterable[str],
            columns: Mapping[str, str] | None):
    reader = csv.DictReader(stream)
    if not reader.fieldnames:
        raise IngestError("missing header")
    names = {k: k for k in (*required, *optional)}
    names.update(columns or {})
    present = set(reader.fieldnames)
    missing = [k for k in required if names[k] not in present]
    if missing:
        raise IngestError("missing columns: " + ", ".join(missing))
    return reader, names, present


def parse_tracking(stream: IO[str], columns: Mapping[str, str] | None = None) -> ParsedTable:
    reader, col, present = _reader(stream, TRACKING_REQUIRED, TRACKING_OPTIONAL, columns)
    out = ParsedTable([], has_goalie_column=col["goalie"] in present)
    for line, row in enumerate(reader, start=2):
        try:
            rec = TrackingRecord(
                game_id=(row.get(col["game_id"]) or "game").strip(),
                period=int(float(row[col["period"]])),
                frame_id=int(float(row[col["frame_id"]])),
                clock=_finite(row[col["clock"]]),
                team_label=row[col["team"]].strip(),
                jersey=_jersey(row[col["jersey"]]),
                x=_finite(row[col["x"]]),
                y=_finite(row[col["y"]]),
                goalie_flag=_flag(row.get(col["goalie"])),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            logger.warning("tracking line %d skipped: %s", line, exc)
            out.skipped.append((line, str(exc)))
            continue
        out.records.append(rec)
    return out


def parse_events(stream: IO[str], columns: Mapping[str, str] | None = None) -> ParsedTable:
    reader, col, _ = _reader(stream, EVENT_REQUIRED, EVENT_OPTIONAL, columns)
    out = ParsedTable([])
    for line, row in enumerate(reader, start=2):
        try:
            p2 = _opt_str(row.get(col["player_2"]))
            rec = EventRecord(
                game_id=(row.get(col["game_id"]) or "game").strip(),
                event_type=row[col["event"]].strip(),
                period=int(float(row[col["period"]])),
                clock=_finite(row[col["clock"]]),
                team=row[col["team"]].strip(),
                player=_jersey(row[col["player"]]),
                x=_finite(row[col["x"]]),
                y=_finite(row[col["y"]]),
                detail=_opt_str(row.get(col["detail"])),
                player_2=_jersey(p2) if p2 is not None else None,
                x2=_opt_float(row.get(col["x2"])),
                y2=_opt_float(row.get(col["y2"])),
                clock_2=_opt_float(row.get(col["clock_2"])),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            logger.warning("event line %d skipped: %s", line, exc)
            out.skipped.append((line, str(exc)))
            continue
        out.records.append(rec)
    return out


def estimate_velocity(prev: tuple[float, float] | None, curr: tuple[float, float],
                      frame_rate: float) -> tuple[float, float]:
    """Finite-difference velocity from consecutive frames; zero without a previous frame."""
    if prev is None:
        return (0.0, 0.0)
    return ((curr[0] - prev[0]) * frame_rate, (curr[1] - prev[1]) * frame_rate)


def infer_pass_speed(distance: float, travel_time: float, cfg: Config) -> float:
    """Launch speed that carries the puck ``distance`` feet in ``travel_time`` seconds.

    Solved by bisection and clamped to ``[min_pass_speed, max_pass_speed]``.
    """
    lo, hi = cfg.min_pass_speed, cfg.max_pass_speed

    def covered(v: float) -> float:
        return float(puck_travel(v, travel_time, cfg)[0])

    if covered(lo) >= distance:
        return lo
    if covered(hi) <= distance:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if covered(mid) < distance:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PassPlay:
    snapshot: Snapshot
    actual_angle: float
    actual_speed: float
    receiver_id: str
    completed: bool
    game_id: str = "game"
    period: int = 1
    clock: float = 0.0

    @property
    def key(self) -> str:
        return f"{self.game_id}/P{self.period}/{self.clock:.3f}/{self.snapshot.passer_id}"

    @property
    def passer_id(self) -> str:
        return self.snapshot.passer_id

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "game_id": self.game_id,
            "period": self.period,
            "clock": self.clock,
            "passer_id": self.snapshot.passer_id,
            "receiver_id": self.receiver_id,
            "completed": self.completed,
            "actual_angle": self.actual_angle,
            "actual_speed": self.actual_speed,
            "snapshot": self.snapshot.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PassPlay":
        return cls(
            snapshot=Snapshot.from_dict(d["snapshot"]),
            actual_angle=float(d["actual_angle"]),
            actual_speed=float(d["actual_speed"]),
            receiver_id=str(d["receiver_id"]),
            completed=bool(d["completed"]),
            game_id=str(d.get("game_id", "game")),
            period=int(d.get("period", 1)),
            clock=float(d.get("clock", 0.0)),
        )


@dataclass
class RejectionReport:
    total: int = 0
    accepted: int = 0
    rejected: dict[str, list[str]] = field(default_factory=lambda: defaultdict(list))
    velocity_clamps: int = 0
    position_clamps: int = 0
    injected: int = 0

    @property
    def n_rejected(self) -> int:
        return sum(len(v) for v in self.rejected.values())

    def reject(self, reason: str, key: str) -> None:
        assert reason in REJECT_REASONS, reason
        self.rejected[reason].append(key)

    def summary(self) -> str:
        lines = [f"{self.accepted} accepted, {self.n_rejected} rejected"]
        for reason in REJECT_REASONS:
            keys = self.rejected.get(reason)
            if keys:
                lines.append(f"  {reason}: {len(keys)}")
                lines.extend(f"    {k}" for k in keys)
        return "\n".join(lines)

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "rejected": {r: list(self.rejected[r]) for r in REJECT_REASONS if self.rejected.get(r)},
            "velocity_clamps": self.velocity_clamps,
            "position_clamps": self.position_clamps,
            "injected": self.injected,
        }


class _FrameIndex:
    """Frames of one (game, period), searchable by clock."""

    def __init__(self, records: list[TrackingRecord]):
        self.frames: dict[int, list[TrackingRecord]] = defaultdict(list)
        clocks: dict[int, float] = {}
        for r in records:
            self.frames[r.frame_id].append(r)
            clocks[r.frame_id] = r.clock
        order = sorted(clocks, key=lambda f: (clocks[f], f))
        self.ids = order
        self.clocks = [clocks[f] for f in order]
        self.clock_of = clocks

    def at_or_before(self, clock: float, tolerance: float) -> int | None:
        i = bisect.bisect_right(self.clocks, clock + 1e-9) - 1
        if i < 0 or clock - self.clocks[i] > tolerance:
            return None
        return self.ids[i]


def _event_key(ev: EventRecord) -> str:
    return f"{ev.game_id}/P{ev.period}/{ev.clock:.3f}/{player_key(ev.team, ev.player)}"


def _travel_time(ev: EventRecord, later: list[EventRecord]) -> float | None:
    if ev.clock_2 is not None:
        return ev.clock_2 - ev.clock if ev.clock_2 > ev.clock else None
    for nxt in later:
        if nxt.clock > ev.clock:
            return nxt.clock - ev.clock
    return None


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(v, lo), hi)


def build_pass_plays(
    tracking: Iterable[TrackingRecord],
    events: Iterable[EventRecord],
    cfg: Config,
    has_goalie_column: bool | None = None,
) -> tuple[list[PassPlay], RejectionReport]:
    """Turn one or more games of parsed records into evaluable pass plays.

    Every pass event is either accepted or rejected with exactly one reason.
    """
    tracking = list(tracking)
    if has_goalie_column is None:
        has_goalie_column = any(r.goalie_flag is not None for r in tracking)
    by_period: dict[tuple[str, int], list[TrackingRecord]] = defaultdict(list)
    for r in tracking:
        by_period[(r.game_id, r.period)].append(r)
    index = {k: _FrameIndex(v) for k, v in by_period.items()}

    ev_by_period: dict[tuple[str, int], list[EventRecord]] = defaultdict(list)
    for ev in events:
        ev_by_period[(ev.game_id, ev.period)].append(ev)

    report = RejectionReport()
    plays: list[PassPlay] = []
    for gp in sorted(ev_by_period):
        evs = sorted(ev_by_period[gp], key=lambda e: e.clock)
        for n, ev in enumerate(evs):
            if not ev.is_pass:
                continue
            report.total += 1
            key = _event_key(ev)
            play = _build_one(ev, evs[n + 1:], index.get(gp), cfg, has_goalie_column, report, key)
            if play is not None:
                plays.append(play)
                report.accepted += 1
    return plays, report


def _build_one(ev, later, frames: _FrameIndex | None, cfg: Config, has_goalie_column: bool,
               report: RejectionReport, key: str) -> PassPlay | None:
    if ev.detail is not None and ev.detail.strip().lower() != "direct":
        report.reject("indirect_pass", key)
        return None
    if ev.player_2 is None or ev.x2 is None or ev.y2 is None:
        report.reject("missing_receiver", key)
        return None

    mirror = ev.x < cfg.rink_length / 2.0

    def norm(x: float, y: float) -> tuple[float, float]:
        return mirror_to_right_half((x, y), cfg) if mirror else (x, y)

    origin = norm(ev.x, ev.y)
    target = norm(ev.x2, ev.y2)
    if origin[0] < cfg.blue_line_x:
        report.reject("outside_offensive_zone", key)
        return None
    length = math.hypot(target[0] - origin[0], target[1] - origin[1])
    if length == 0.0:
        report.reject("zero_length_pass", key)
        return None
    travel = _travel_time(ev, later)
    if travel is None or travel <= 0:
        report.reject("no_travel_time", key)
        return None
    frame = frames.at_or_before(ev.clock, cfg.frame_match_tolerance) if frames else None
    if frame is None:
        report.reject("no_frame", key)
        return None

    current = frames.frames[frame]
    previous = {r.player_id: r for r in frames.frames.get(frame - 1, [])}
    v_cap = cfg.velocity_clamp_factor * cfg.v_max
    players: dict[str, PlayerState] = {}
    goalie_flags: dict[str, bool] = {}
    for r in current:
        pos = norm(r.x, r.y)
        clamped = (_clamp(pos[0], 0.0, cfg.rink_length), _clamp(pos[1], 0.0, cfg.rink_width))
        if clamped != pos:
            report.position_clamps += 1
        prev = previous.get(r.player_id)
        vel = estimate_velocity(norm(prev.x, prev.y) if prev else None, pos, cfg.frame_rate)
        speed = math.hypot(*vel)
        if speed > v_cap:
            vel = (vel[0] * v_cap / speed, vel[1] * v_cap / speed)
            report.velocity_clamps += 1
        team = Team.OFFENCE if r.team_label == ev.team else Team.DEFENCE
        players[r.player_id] = PlayerState(r.player_id, team, clamped, vel)
        goalie_flags[r.player_id] = bool(r.goalie_flag)

    # team filters look at tracked players only, before any injection
    counts = {Team.OFFENCE: 0, Team.DEFENCE: 0}
    for p in players.values():
        counts[p.team] += 1
    if min(counts.values()) == 0:
        report.reject("one_team_only", key)
        return None
    if min(counts.values()) < 2:
        report.reject("too_few_players", key)
        return None

    passer_id = player_key(ev.team, ev.player)
    receiver_id = player_key(ev.team, ev.player_2)
    for pid, where in ((passer_id, origin), (receiver_id, target)):
        if pid not in players:
            players[pid] = PlayerState(
                pid, Team.OFFENCE,
                (_clamp(where[0], 0.0, cfg.rink_length), _clamp(where[1], 0.0, cfg.rink_width)),
            )
            report.injected += 1

    if has_goalie_column:
        goalies = {pid for pid, g in goalie_flags.items() if g}
    else:
        defenders = [p for p in players.values() if p.team is Team.DEFENCE]
        nearest = min(
            defenders,
            key=lambda p: (math.hypot(p.position[0] - cfg.goal_x, p.position[1] - cfg.goal_y), p.player_id),
        )
        goalies = {nearest.player_id}
    states = tuple(
        PlayerState(p.player_id, p.team, p.position, p.velocity, p.player_id in goalies)
        for p in sorted(players.values(), key=lambda p: p.player_id)
    )

    puck = (_clamp(origin[0], 0.0, cfg.rink_length), _clamp(origin[1], 0.0, cfg.rink_width))
    snapshot = Snapshot(states, puck, passer_id, frame_time=frames.clock_of[frame])
    return PassPlay(
        snapshot=snapshot,
        actual_angle=wrap_angle(math.atan2(target[1] - origin[1], target[0] - origin[0])),
        actual_speed=infer_pass_speed(length, travel, cfg),
        receiver_id=receiver_id,
        completed=PASS_EVENTS[ev.event_type],
        game_id=ev.game_id,
        period=ev.period,
        clock=ev.clock,
    )


def write_plays(plays: Iterable[PassPlay], fh: IO[str]) -> None:
    for play in plays:
        fh.write(json.dumps(play.to_dict()) + "\n")


def read_play_lines(fh: IO[str]) -> list[str]:
    return [line for line in fh.read().splitlines() if line.strip()]


def load_plays(fh: IO[str]) -> list[PassPlay]:
    return [PassPlay.from_dict(json.loads(line)) for line in read_play_lines(fh)]
