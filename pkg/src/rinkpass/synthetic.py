"""Deterministic synthetic tracking and event files for demos and tests.

Each play is a 5-on-4 power play in the attacking zone: five offensive
skaters against four defenders and a goaltender, two tracking frames one
frame apart, and one pass event.  Every third play is recorded in the left
half of the rink so ingestion has to mirror it.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

OFFENCE_TEAM = "Blue"
DEFENCE_TEAM = "Red"
OFFENCE_JERSEYS = ("7", "11", "19", "23", "91")
DEFENCE_JERSEYS = ("2", "4", "44", "55")
GOALIE_JERSEY = "30"
PASSERS = ("7", "11", "19")  # four passes each

TRACKING_COLUMNS = ("game_id", "period", "frame_id", "clock", "team", "jersey", "x", "y", "goalie")
EVENT_COLUMNS = ("game_id", "period", "clock", "team", "player", "event", "x", "y",
                 "detail", "player_2", "x2", "y2", "clock_2")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def synthetic_rows(seed: int = 7, n_plays: int = 12, one_team_play: int | None = None,
                   frame_rate: float = 30.0) -> tuple[list[dict], list[dict]]:
    """Rows for ``tracking.csv`` and ``events.csv``.

    ``one_team_play`` drops the offence from that play's frames, which the
    ingestion filters must reject.
    """
    rng = np.random.default_rng(seed)
    tracking: list[dict] = []
    events: list[dict] = []
    frame = 0
    for k in range(n_plays):
        clock = 20.0 * k + 10.0
        passer = PASSERS[k % len(PASSERS)]
        others = [j for j in OFFENCE_JERSEYS if j != passer]
        receiver = others[int(rng.integers(len(others)))]
        left = k % 3 == 2

        pos: dict[tuple[str, str], tuple[float, float]] = {}
        vel: dict[tuple[str, str], tuple[float, float]] = {}
        for j in OFFENCE_JERSEYS:
            pos[(OFFENCE_TEAM, j)] = (float(rng.uniform(135, 190)), float(rng.uniform(8, 77)))
            vel[(OFFENCE_TEAM, j)] = tuple(rng.normal(0, 8, 2))
        for j in DEFENCE_JERSEYS:
            pos[(DEFENCE_TEAM, j)] = (float(rng.uniform(150, 185)), float(rng.uniform(15, 70)))
            vel[(DEFENCE_TEAM, j)] = tuple(rng.normal(0, 8, 2))
        pos[(DEFENCE_TEAM, GOALIE_JERSEY)] = (float(rng.uniform(185, 188)), float(rng.uniform(39, 46)))
        vel[(DEFENCE_TEAM, GOALIE_JERSEY)] = (0.0, float(rng.normal(0, 2)))

        def place(x: float, y: float) -> tuple[float, float]:
            return (200.0 - x, 85.0 - y) if left else (x, y)

        for step, t in ((0, clock - 1.0 / frame_rate), (1, clock)):
            for (team, j), (x, y) in sorted(pos.items()):
                if one_team_play == k and team == OFFENCE_TEAM:
                    continue
                vx, vy = vel[(team, j)]
                # positions at the later frame are the sampled ones
                back = 1.0 - step
                px, py = place(x - vx * back / frame_rate, y - vy * back / frame_rate)
                tracking.append({
                    "game_id": "synthetic", "period": 1, "frame_id": frame + step,
                    "clock": _fmt(t), "team": team, "jersey": j,
                    "x": _fmt(px), "y": _fmt(py),
                    "goalie": 1 if j == GOALIE_JERSEY else 0,
                })
        frame += 2

        sx, sy = pos[(OFFENCE_TEAM, passer)]
        rx, ry = pos[(OFFENCE_TEAM, receiver)]
        travel = math.hypot(rx - sx, ry - sy) / float(rng.uniform(45, 80))
        ex, ey = place(sx, sy)
        ex2, ey2 = place(rx, ry)
        events.append({
            "game_id": "synthetic", "period": 1, "clock": _fmt(clock),
            "team": OFFENCE_TEAM, "player": passer,
            "event": "Play" if rng.uniform() < 0.7 else "Incomplete Play",
            "x": _fmt(ex), "y": _fmt(ey), "detail": "Direct",
            "player_2": receiver, "x2": _fmt(ex2), "y2": _fmt(ey2),
            "clock_2": _fmt(clock + max(travel, 0.1)),
        })
    return tracking, events


def _write(path: Path, columns: tuple[str, ...], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_synthetic(directory: str | Path, seed: int = 7, n_plays: int = 12,
                    one_team_play: int | None = None) -> tuple[Path, Path]:
    """Write ``tracking.csv`` and ``events.csv`` into ``directory``; returns their paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    tracking, events = synthetic_rows(seed, n_plays, one_team_play)
    t_path, e_path = out / "tracking.csv", out / "events.csv"
    _write(t_path, TRACKING_COLUMNS, tracking)
    _write(e_path, EVENT_COLUMNS, events)
    return t_path, e_path
