"""Command-line front end.

Commands: ``synth``, ``validate``, ``ingest``, ``evaluate``, ``batch`` and
``summarize``.  Outputs go into a run directory
``<out>/run-<UTC timestamp>-<hash12>`` (or ``--run-dir``), together with a
``manifest.json`` recording input hashes, configuration, seed and version.

Exit codes: 0 success, 2 input error, 3 play selector error, 4 nothing to do.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .analysis import (DECISION_COLUMNS, OUTCOME_COLUMNS, decision_summary, outcome_summary,
                       summaries_to_csv)
from .control import control_grid, grid_to_csv
from .core import Config, ConfigError, SnapshotError, check_snapshot, load_config
from .ingestion import (IngestError, PassPlay, build_pass_plays, parse_events, parse_tracking,
                        read_play_lines, write_plays)
from .metrics import PlayEvaluation, evaluate_play
from .scoring import location_value_grid, scoring_grid
from .svg import heatmap_svg, polar_svg, summary_svg
from .synthetic import write_synthetic

log = logging.getLogger("rinkpass")

EXIT_OK, EXIT_INPUT, EXIT_SELECTOR, EXIT_EMPTY = 0, 2, 3, 4
CONFIG_ENV = "RINKPASS_CONFIG"
GRID_FILES = (
    "control_grid.csv", "scoring_grid.csv", "location_value_grid.csv",
    "clv_triplets.csv", "lpv_triplets.csv", "success_polar.csv", "epv_polar.csv",
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _config(args: argparse.Namespace) -> tuple[Config, str | None]:
    path = args.config or os.environ.get(CONFIG_ENV) or None
    try:
        return load_config(path), path
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_INPUT) from exc
    except ConfigError as exc:
        raise CliError(f"invalid config {path}: {exc}", EXIT_INPUT) from exc


def _read_text(path: str) -> str:
    try:
        with open(path, newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from exc


class _Run:
    """Run directory plus the manifest describing it."""

    def __init__(self, args: argparse.Namespace, command: str, cfg: Config, config_path: str | None,
                 inputs: Sequence[str], seed: int | None = None):
        self.manifest: dict[str, Any] = {
            "command": command,
            "version": __version__,
            "config_path": config_path,
            "config": cfg.to_dict(),
            "seed": seed,
            "inputs": {p: sha256_file(p) for p in inputs},
        }
        digest = hashlib.sha256(json.dumps(self.manifest, sort_keys=True).encode()).hexdigest()[:12]
        if getattr(args, "run_dir", None):
            self.path = Path(args.run_dir)
        else:
            stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
            self.path = Path(args.out) / f"run-{stamp}-{digest}"
        self.path.mkdir(parents=True, exist_ok=True)
        self.manifest["output_dir"] = str(self.path)
        self.manifest["content_hash"] = digest

    def write(self, name: str, text: str) -> Path:
        p = self.path / name
        with open(p, "w", newline="") as fh:
            fh.write(text)
        return p

    def close(self, **extra: Any) -> None:
        self.manifest.update(extra)
        self.write("manifest.json", json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")


def _ingest(tracking: str, events: str, cfg: Config):
    try:
        tr = parse_tracking(io.StringIO(_read_text(tracking)))
        ev = parse_events(io.StringIO(_read_text(events)))
    except IngestError as exc:
        raise CliError(f"{exc}", EXIT_INPUT) from exc
    plays, report = build_pass_plays(tr.records, ev.records, cfg, tr.has_goalie_column)
    return plays, report, tr.warnings + ev.warnings


def _load_play_lines(args: argparse.Namespace, cfg: Config) -> tuple[list[str], list[str]]:
    """Raw JSON lines of the plays to work on, and the input files they came from."""
    if args.plays:
        return read_play_lines(io.StringIO(_read_text(args.plays))), [args.plays]
    if args.tracking and args.events:
        plays, _, _ = _ingest(args.tracking, args.events, cfg)
        return [json.dumps(p.to_dict()) for p in plays], [args.tracking, args.events]
    raise CliError("give --plays, or --tracking and --events", EXIT_INPUT)


# ---------------------------------------------------------------- commands


def cmd_synth(args: argparse.Namespace) -> int:
    t, e = write_synthetic(args.out, seed=args.seed, n_plays=args.plays,
                           one_team_play=args.one_team_play)
    print(f"wrote {t} and {e}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    _, report, warnings = _ingest(args.tracking, args.events, cfg)
    print(report.summary())
    if warnings:
        print(f"{warnings} malformed rows skipped")
    if report.velocity_clamps or report.position_clamps or report.injected:
        print(f"velocity clamps: {report.velocity_clamps}, position clamps: {report.position_clamps}, "
              f"injected players: {report.injected}")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg, _ = _config(args)
    plays, report, _ = _ingest(args.tracking, args.events, cfg)
    with open(args.output, "w") as fh:
        write_plays(plays, fh)
    print(report.summary())
    return EXIT_OK if plays else EXIT_EMPTY


def _select(lines: list[str], selector: str | None) -> PassPlay:
    plays = []
    for line in lines:
        try:
            plays.append(PassPlay.from_dict(json.loads(line)))
        except (KeyError, TypeError, ValueError):
            continue
    # exact key, then a bare number as an index, then a key substring
    if selector is None:
        matches = plays
    elif exact := [p for p in plays if p.key == selector]:
        matches = exact
    elif selector.isdigit():
        i = int(selector)
        matches = plays[i:i + 1]
    else:
        matches = [p for p in plays if selector in p.key]
    if len(matches) != 1:
        what = "no play matches" if not matches else f"{len(matches)} plays match"
        raise CliError(f"{what} selector {selector!r}", EXIT_SELECTOR)
    return matches[0]


def _parse_speeds(text: str | None) -> tuple[float, ...] | None:
    if text is None:
        return None
    try:
        speeds = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise CliError(f"bad --speeds {text!r}", EXIT_INPUT) from exc
    if not speeds or min(speeds) <= 0:
        raise CliError("--speeds must be positive numbers", EXIT_INPUT)
    return speeds


def _polar_csv(angles, speeds, values) -> str:
    rows = ["angle,speed,value"]
    for i, a in enumerate(angles):
        for j, s in enumerate(speeds):
            rows.append(f"{a:.6f},{s:.4f},{values[i, j]:.8f}")
    return "\n".join(rows) + "\n"


def _triplet_csv(ev: PlayEvaluation, which: str) -> str:
    surf = ev.surface
    rows = ["angle,speed,x,y,t,value"]
    for i, a in enumerate(surf.angles):
        for j, s in enumerate(surf.speeds):
            part = surf.slice(i, j)
            for x, y, t, v in zip(part["x"], part["y"], part["t"], part[which]):
                rows.append(f"{a:.6f},{s:.4f},{x:.4f},{y:.4f},{t:.4f},{v:.8f}")
    return "\n".join(rows) + "\n"


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg, cfg_path = _config(args)
    speeds = _parse_speeds(args.speeds)
    if speeds is not None:
        cfg = cfg.replace(candidate_speeds=speeds)
    lines, inputs = _load_play_lines(args, cfg)
    play = _select(lines, args.play)
    try:
        ev = evaluate_play(play, cfg)
    except SnapshotError as exc:
        raise CliError(f"play {play.key} cannot be evaluated: {exc}", EXIT_INPUT) from exc

    run = _Run(args, "evaluate", cfg, cfg_path, inputs)
    run.write("evaluation.json", json.dumps(ev.to_dict(include_surface=True), indent=2) + "\n")
    snap = play.snapshot
    res = args.resolution
    surf = ev.surface
    # polar maps use the first candidate speed unless told otherwise
    i_speed = 0
    if args.grids or args.svg:
        cg = control_grid(snap, res, 0.0, cfg)
        sx, sy, sv = scoring_grid(res, cfg)
        lx, ly, lv = location_value_grid(snap, res, 0.0, cfg)
    if args.grids:
        run.write("control_grid.csv", grid_to_csv(cg.xs, cg.ys, cg.values))
        run.write("scoring_grid.csv", grid_to_csv(sx, sy, sv))
        run.write("location_value_grid.csv", grid_to_csv(lx, ly, lv))
        run.write("clv_triplets.csv", _triplet_csv(ev, "clv"))
        run.write("lpv_triplets.csv", _triplet_csv(ev, "lpv"))
        run.write("success_polar.csv", _polar_csv(surf.angles, surf.speeds, surf.success))
        run.write("epv_polar.csv", _polar_csv(surf.angles, surf.speeds, surf.expected))
    if args.svg:
        run.write("control.svg", heatmap_svg(cg.xs, cg.ys, cg.values, cfg, "Rink control", snapshot=snap))
        run.write("scoring.svg", heatmap_svg(sx, sy, sv, cfg, "Scoring probability",
                                             vmax=float(sv.max()), snapshot=snap))
        run.write("location_value.svg", heatmap_svg(lx, ly, lv, cfg, "Location value",
                                                    vmax=float(max(lv.max(), 1e-12)), snapshot=snap))
        run.write("success_polar.svg", polar_svg(surf.angles, surf.success[:, i_speed], snap, cfg,
                                                 f"Success probability, {surf.speeds[i_speed]:g} ft/s",
                                                 vmax=1.0))
        run.write("epv_polar.svg", polar_svg(surf.angles, surf.expected[:, i_speed], snap, cfg,
                                             f"Expected pass value, {surf.speeds[i_speed]:g} ft/s"))
    run.close(play=play.key, statuses=[{"key": play.key, "status": "ok"}])
    print(json.dumps({k: v for k, v in ev.to_dict().items()
                      if k in ("key", "best_outcome", "actual_value", "relative_outcome", "best_choice")}))
    print(f"outputs in {run.path}")
    return EXIT_OK


def _evaluate_line(job: tuple[str, dict[str, Any]]) -> str:
    """Evaluate one raw play line; never raises, so one bad play cannot sink a batch."""
    line, cfg_dict = job
    cfg = Config.from_dict(cfg_dict)
    data: Any = None
    try:
        data = json.loads(line)
        play = PassPlay.from_dict(data)
        check_snapshot(play.snapshot, cfg)
    except (KeyError, TypeError, ValueError) as exc:
        key = data.get("key") if isinstance(data, dict) else None
        return json.dumps({"key": key, "status": "rejected", "error": str(exc)})
    try:
        row = evaluate_play(play, cfg, keep_surface=False).to_dict()
    except (ValueError, FloatingPointError) as exc:
        return json.dumps({"key": play.key, "status": "failed", "error": str(exc)})
    row["status"] = "ok"
    return json.dumps(row)


def cmd_batch(args: argparse.Namespace) -> int:
    cfg, cfg_path = _config(args)
    lines, inputs = _load_play_lines(args, cfg)
    if not lines:
        print("no plays to evaluate", file=sys.stderr)
        return EXIT_EMPTY
    jobs = [(line, cfg.to_dict()) for line in lines]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            # map keeps input order, so the writer below sees a fixed sequence
            results = list(pool.map(_evaluate_line, jobs, chunksize=1))
    else:
        results = [_evaluate_line(j) for j in jobs]

    run = _Run(args, "batch", cfg, cfg_path, inputs, seed=args.seed)
    run.write("evaluations.jsonl", "".join(r + "\n" for r in results))
    statuses = []
    for i, r in enumerate(results):
        row = json.loads(r)
        statuses.append({"index": i, "key": row.get("key"), "status": row["status"]})
    n_ok = sum(s["status"] == "ok" for s in statuses)
    run.close(statuses=statuses, evaluated=n_ok, jobs=args.jobs)
    print(f"{n_ok} evaluated, {len(statuses) - n_ok} not evaluated")
    print(f"outputs in {run.path}")
    return EXIT_OK if n_ok else EXIT_INPUT


def cmd_summarize(args: argparse.Namespace) -> int:
    text = _read_text(args.evaluations)
    try:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.evaluations}: {exc}", EXIT_INPUT) from exc
    if args.min_passes < 1:
        raise CliError("--min-passes must be at least 1", EXIT_INPUT)
    ok = [r for r in rows if r.get("status", "ok") == "ok"]
    decision = decision_summary(ok, args.min_passes)
    outcome = outcome_summary(ok, args.min_passes)
    if not decision:
        print(f"warning: no player has at least {args.min_passes} evaluated passes", file=sys.stderr)

    cfg, cfg_path = _config(args)
    run = _Run(args, "summarize", cfg, cfg_path, [args.evaluations])
    run.write("decision_summary.csv", summaries_to_csv(decision, DECISION_COLUMNS))
    run.write("outcome_summary.csv", summaries_to_csv(outcome, OUTCOME_COLUMNS))
    run.write("summary.svg", summary_svg(decision, outcome))
    run.close(min_passes=args.min_passes, players=len(decision))
    print(f"{len(decision)} players summarised")
    print(f"outputs in {run.path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rinkpass", description="Interception-aware pass evaluation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, data: bool = True, out: bool = True) -> None:
        sp.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV} or built-in defaults)")
        if data:
            sp.add_argument("--plays", help="JSONL of ingested plays")
            sp.add_argument("--tracking", help="tracking CSV")
            sp.add_argument("--events", help="event CSV")
        if out:
            sp.add_argument("--out", default="out", help="parent of the run directory")
            sp.add_argument("--run-dir", help="exact output directory (skips timestamped naming)")

    sp = sub.add_parser("synth", help="write the synthetic demo dataset")
    sp.add_argument("out")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--plays", type=int, default=12)
    sp.add_argument("--one-team-play", type=int, default=None,
                    help="drop the offence from this play's tracking frames")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("validate", help="report which passes ingestion accepts")
    sp.add_argument("--config")
    sp.add_argument("--tracking", required=True)
    sp.add_argument("--events", required=True)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("ingest", help="write accepted plays as JSONL")
    sp.add_argument("--config")
    sp.add_argument("--tracking", required=True)
    sp.add_argument("--events", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("evaluate", help="evaluate one play")
    common(sp)
    sp.add_argument("--play", help="play key, unique key substring, or index")
    sp.add_argument("--speeds", help="comma-separated candidate speeds in ft/s")
    sp.add_argument("--grids", action="store_true", help="write the CSV grids and polar maps")
    sp.add_argument("--svg", action="store_true", help="render SVG figures")
    sp.add_argument("--resolution", type=float, default=1.0, help="grid cell size in feet")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("batch", help="evaluate every play")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    sp.set_defaults(func=cmd_batch)

    sp = sub.add_parser("summarize", help="per-player summaries from a batch")
    common(sp, data=False)
    sp.add_argument("--evaluations", required=True)
    sp.add_argument("--min-passes", type=int, default=3)
    sp.set_defaults(func=cmd_summarize)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
