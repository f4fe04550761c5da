"""Per-player passing tendencies and outcomes across many evaluated plays."""

from __future__ import annotations

import io
import statistics
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

QUADRANTS = ("best", "conservative", "aggressive", "worst")


@dataclass(frozen=True)
class PlayerSummary:
    player_id: str
    pass_count: int
    avg_success_probability: float
    avg_best_case_value: float
    avg_best_outcome: float
    avg_relative_outcome: float
    quadrant: str


def _as_row(ev: Any) -> Mapping[str, Any]:
    if isinstance(ev, Mapping):
        return ev
    return ev.to_dict()


def _mean(values: list[float]) -> float:
    return statistics.fmean(values) if values else 0.0


def quadrant(success: float, best_case: float, success_cut: float, value_cut: float) -> str:
    """High success means low risk; high best-case value means high reward."""
    safe = success >= success_cut
    rewarding = best_case >= value_cut
    if safe and rewarding:
        return "best"
    if safe:
        return "conservative"
    if rewarding:
        return "aggressive"
    return "worst"


def _aggregate(evaluations: Iterable[Any], min_passes: int,
               thresholds: tuple[float, float] | None) -> list[PlayerSummary]:
    if min_passes < 1:
        raise ValueError("min_passes must be at least 1")
    grouped: dict[str, list[Mapping[str, Any]]] = defaultdict(list)
    for ev in evaluations:
        row = _as_row(ev)
        if row.get("status", "ok") != "ok":
            continue
        grouped[str(row["passer_id"])].append(row)

    # sorting inside each group keeps the float sums independent of input order
    stats = {}
    for pid, rows in grouped.items():
        if len(rows) < min_passes:
            continue
        rows = sorted(rows, key=lambda r: r["key"])
        stats[pid] = (
            len(rows),
            _mean([r["actual_success"] for r in rows]),
            _mean([r["actual_best_case"] for r in rows]),
            _mean([r["best_outcome"] for r in rows]),
            _mean([r["relative_outcome"] for r in rows]),
        )
    if not stats:
        return []
    if thresholds is None:
        success_cut = statistics.median(s[1] for s in stats.values())
        value_cut = statistics.median(s[2] for s in stats.values())
    else:
        success_cut, value_cut = thresholds
    return [
        PlayerSummary(pid, n, succ, best_case, best_out, rel,
                      quadrant(succ, best_case, success_cut, value_cut))
        for pid, (n, succ, best_case, best_out, rel) in sorted(stats.items())
    ]


def decision_summary(evaluations: Iterable[Any], min_passes: int = 3,
                     thresholds: tuple[float, float] | None = None) -> list[PlayerSummary]:
    """Average success probability and best-case value of each player's attempted passes.

    Players with fewer than ``min_passes`` evaluated passes are left out.  The
    quadrant split is at the cohort medians unless fixed ``thresholds``
    ``(success, best_case)`` are given.
    """
    return _aggregate(evaluations, min_passes, thresholds)


def outcome_summary(evaluations: Iterable[Any], min_passes: int = 3,
                    thresholds: tuple[float, float] | None = None) -> list[PlayerSummary]:
    """Average best outcome and relative outcome per player, same cohort rule."""
    return sorted(
        _aggregate(evaluations, min_passes, thresholds),
        key=lambda s: (-s.avg_relative_outcome, s.player_id),
    )


DECISION_COLUMNS = ("player_id", "pass_count", "avg_success_probability", "avg_best_case_value", "quadrant")
OUTCOME_COLUMNS = ("player_id", "pass_count", "avg_best_outcome", "avg_relative_outcome")


def summaries_to_csv(rows: list[PlayerSummary], columns: tuple[str, ...]) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        cells = []
        for c in columns:
            v = getattr(r, c)
            cells.append(f"{v:.10f}" if isinstance(v, float) else str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
