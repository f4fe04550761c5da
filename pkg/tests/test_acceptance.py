"""Exit criteria.  Each test prints one PASS/FAIL line and the conftest summary
repeats them at the end of the run."""

from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from pathlib import Path

import numpy as np
import pytest
from conftest import bearing, player, random_snapshot, snapshot
from oracles import player_rk4, puck_rk4, simulate_pickups

from rinkpass.analysis import decision_summary, outcome_summary
from rinkpass.cli import main as cli_main
from rinkpass.control import control_at, control_from_arrivals, control_grid
from rinkpass.core import Config, PlayerState, Team, wrap_angle
from rinkpass.ingestion import PassPlay, write_plays
from rinkpass.metrics import evaluate_play, pass_surface
from rinkpass.motion import (PassTrajectory, PlayerArrays, arrival_times, pass_trajectories,
                             player_position, puck_state)
from rinkpass.passing import evaluate_trajectories
from rinkpass.scoring import scoring_probability
from rinkpass.svg import heatmap_svg, summary_svg

GOLDEN = Path(__file__).parent / "golden"


def report(request, ok: bool, detail: str) -> None:
    n, title = request.node.get_closest_marker("acceptance").args
    request.node.user_properties.append(("detail", detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} [{detail}]")


@pytest.mark.acceptance(1, "closed-form player and puck motion match RK4 to 1e-6 ft")
def test_motion_matches_rk4(request, cfg):
    rng = np.random.default_rng(2024)
    n = 100
    start = time.perf_counter()

    pos = np.column_stack([rng.uniform(0, 200, n), rng.uniform(0, 85, n)])
    vel = rng.normal(0, 15, (n, 2))
    phi = rng.uniform(-math.pi, math.pi, n)
    t = rng.uniform(0, 3, n)
    closed = np.array([
        player_position(PlayerState(f"p{i}", Team.OFFENCE, pos[i], vel[i]), phi[i], t[i], cfg)
        for i in range(n)
    ])
    ref = player_rk4(pos, vel, phi, t, cfg.gamma, cfg.v_max, cfg.t_reaction)
    player_err = float(np.abs(closed - ref).max())

    speed = rng.uniform(20, 120, n)  # stop times all exceed 3 s at these speeds
    ang = rng.uniform(-math.pi, math.pi, n)
    v0 = np.column_stack([speed * np.cos(ang), speed * np.sin(ang)])
    tp = rng.uniform(0, 3, n)
    closed_puck = np.array([puck_state(tuple(pos[i]), tuple(v0[i]), tp[i], cfg)[0] for i in range(n)])
    ref_puck = puck_rk4(pos, v0, tp, cfg.kappa, cfg.mu_decel)
    puck_err = float(np.abs(closed_puck - ref_puck).max())

    elapsed = time.perf_counter() - start
    ok = player_err <= 1e-6 and puck_err <= 1e-6 and elapsed < 5.0
    report(request, ok, f"player {player_err:.1e} ft, puck {puck_err:.1e} ft, {elapsed:.2f} s")
    assert player_err <= 1e-6
    assert puck_err <= 1e-6
    assert elapsed < 5.0


@pytest.mark.acceptance(2, "beta limits: proportion at beta=0, nearest-arrival indicator at beta=50")
def test_control_beta_limits(request):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        n_off, n_def = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        snap = random_snapshot(rng, n_off, n_def, goalie=bool(rng.integers(2)))
        n_def += any(p.is_goalie for p in snap.players)
        qx, qy = rng.uniform(0, 200, 200), rng.uniform(0, 85, 200)
        t = rng.uniform(0, 2, 200)
        rc = control_at(snap, qx, qy, t, Config(beta=0.0))
        worst = max(worst, float(np.abs(rc - n_off / (n_off + n_def)).max()))

    cfg50 = Config(beta=50.0)
    cells = side_ok = tight_ok = 0
    for _ in range(50):
        snap = random_snapshot(rng)
        pa = PlayerArrays.from_players(snap.players, cfg50)
        qx, qy = rng.uniform(0, 200, 400), rng.uniform(0, 85, 400)
        arrive, _ = arrival_times(pa, qx, qy, cfg50)
        rc = control_from_arrivals(arrive, pa.sign, 0.0, cfg50)
        tau = np.maximum(arrive, cfg50.tau_floor)
        off, dfn = tau[pa.sign > 0].min(axis=0), tau[pa.sign < 0].min(axis=0)
        sel = np.abs(off - dfn) >= 2 * cfg50.tau_floor
        indicator = (off < dfn).astype(float)
        cells += int(sel.sum())
        side_ok += int(((rc > 0.5) == (indicator > 0.5))[sel].sum())
        tight_ok += int((np.abs(rc - indicator) <= 0.01)[sel].sum())
    side_rate, tight_rate = side_ok / cells, tight_ok / cells

    ok = worst <= 1e-12 and side_rate >= 0.99
    report(request, ok, f"beta=0 max dev {worst:.1e}; beta=50 indicator match {side_rate:.4f} "
                        f"of {cells} cells (within 0.01: {tight_rate:.3f})")
    assert worst <= 1e-12
    assert side_rate >= 0.99


@pytest.mark.acceptance(3, "probability conservation over 200 random passes")
def test_probability_conservation(request, cfg):
    rng = np.random.default_rng(5)
    worst_team = worst_total = 0.0
    in_range = True
    for _ in range(200):
        snap = random_snapshot(rng, int(rng.integers(2, 6)), int(rng.integers(2, 6)))
        angle = float(rng.uniform(-math.pi, math.pi))
        speed = float(rng.uniform(20, 120))
        batch = evaluate_trajectories(snap, pass_trajectories(snap.puck, [angle], [speed], cfg), cfg)
        for arr in (batch.base, batch.conditional, batch.unconditional, batch.survival, batch.residual,
                    batch.off, batch.deff, batch.off_given_arrival, batch.def_given_arrival):
            in_range &= bool(np.all((arr >= 0) & (arr <= 1)))
        team = np.maximum(batch.off_given_arrival, batch.def_given_arrival)
        worst_team = max(worst_team, float(team.max(initial=0.0)) - 1.0)
        total = batch.unconditional.sum() + batch.residual[0]
        worst_total = max(worst_total, abs(float(total) - 1.0))

    ok = in_range and worst_team <= 1e-12 and worst_total <= 1e-9
    report(request, ok, f"all in [0,1]: {in_range}; team sum excess {worst_team:.1e}; "
                        f"conservation error {worst_total:.1e}")
    assert in_range
    assert worst_team <= 1e-12
    assert worst_total <= 1e-9


def _interception_fixture(rng, cfg):
    """Up to four pick-up candidates close to a pass lane of at most 20 samples."""
    angle = float(rng.uniform(-0.6, 0.6))
    passer = player("p", "offence", 140.0, 42.5)
    n = int(rng.integers(2, 5))
    others = []
    for k in range(n):
        along = rng.uniform(5, 40)
        across = rng.normal(0, 4)
        x = 140 + along * math.cos(angle) - across * math.sin(angle)
        y = 42.5 + along * math.sin(angle) + across * math.cos(angle)
        team = "offence" if k % 2 == 0 else "defence"
        others.append(player(f"{team[0]}{k}", team, x, y, *rng.normal(0, 5, 2)))
    snap = snapshot([passer, *others])
    full = pass_trajectories(snap.puck, [angle], [float(rng.uniform(40, 80))], cfg)[0]
    m = min(len(full), int(rng.integers(8, 21)))
    traj = PassTrajectory(full.angle, full.speed, full.x[:m], full.y[:m], full.t[:m], full.termination)
    return snap, traj


@pytest.mark.slow
@pytest.mark.acceptance(4, "analytic pick-up totals within 3 SE of a 1e6-trial simulation")
def test_pickup_matches_simulation(request, cfg):
    rng = np.random.default_rng(99)
    sim_rng = np.random.default_rng(12345)
    trials = 1_000_000
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        snap, traj = _interception_fixture(rng, cfg)
        field = evaluate_trajectories(snap, [traj], cfg).field(0)
        analytic = field.unconditional.sum(axis=1)
        freq, loose = simulate_pickups(field.base, field.distance, trials, sim_rng)
        se = np.sqrt(np.maximum(analytic * (1 - analytic), 1e-12) / trials)
        worst = max(worst, float((np.abs(freq - analytic) / se).max()))
        se_loose = math.sqrt(max(loose * (1 - loose), 1e-12) / trials)
        worst = max(worst, abs(loose - field.survival[-1]) / se_loose)
    elapsed = time.perf_counter() - start
    ok = worst <= 3.0 and elapsed < 60.0
    report(request, ok, f"largest deviation {worst:.2f} SE, {elapsed:.1f} s")
    assert worst <= 3.0
    assert elapsed < 60.0


@pytest.mark.acceptance(5, "scoring probability spot checks")
def test_scoring_spot_checks(request, cfg):
    cases = [((180, 42.5), 0.48015), ((189, 20), 0.04541), ((195, 42.5), 0.24555)]
    got = [scoring_probability(x, y, cfg) for (x, y), _ in cases]
    errs = [abs(g - want) for g, (_, want) in zip(got, cases)]
    ok = max(errs) <= 1e-5
    report(request, ok, ", ".join(f"{g:.6f}" for g in got))
    assert ok


def two_on_one():
    passer, open_rx, blocked_rx = (150.0, 10.0), (170.0, 42.5), (150.0, 70.0)
    snap = snapshot([
        player("o1", "offence", *passer),
        player("o2", "offence", *open_rx),
        player("o3", "offence", *blocked_rx),
        player("d1", "defence", 150.0, 40.0),
        player("g", "defence", 187.0, 42.5, goalie=True),
    ])
    return snap, bearing(passer, open_rx), bearing(passer, blocked_rx)


@pytest.mark.acceptance(6, "2v1: open lane beats blocked lane; best pass points at the open receiver")
def test_two_on_one_direction(request, cfg):
    snap, open_b, blocked_b = two_on_one()
    lanes = pass_surface(snap, cfg.candidate_speeds, cfg, angles=[open_b, blocked_b])
    margin = float(lanes.expected[0].max() - lanes.expected[1].max())
    ev = evaluate_play(PassPlay(snap, open_b, 65.0, "o2", True), cfg)
    off = abs(wrap_angle(ev.best_angle - open_b)) if ev.best_angle is not None else math.inf
    ok = margin > 0 and ev.best_choice == "pass" and off <= 2 * cfg.d_alpha
    report(request, ok, f"EPV margin {margin:.4f}, argmax {off:.3f} rad from open bearing")
    assert margin > 0
    assert ev.best_choice == "pass"
    assert off <= 2 * cfg.d_alpha


@pytest.mark.acceptance(7, "relative outcome in [0,1]; argmax passes score exactly 1")
def test_relative_outcome_bounds(request, cfg, fixture_plays):
    evs = [evaluate_play(p, cfg, keep_surface=False) for p in fixture_plays]
    rel = [e.relative_outcome for e in evs]
    bounded = all(0.0 <= r <= 1.0 for r in rel)
    rebuilt = []
    for play, ev in zip(fixture_plays, evs):
        if ev.best_choice != "pass":
            continue
        at_best = dataclasses.replace(play, actual_angle=ev.best_angle, actual_speed=ev.best_speed)
        rebuilt.append(evaluate_play(at_best, cfg, keep_surface=False).relative_outcome)
    exact = bool(rebuilt) and all(r == 1.0 for r in rebuilt)
    ok = bounded and exact
    report(request, ok, f"range [{min(rel):.3f}, {max(rel):.3f}] over {len(rel)} plays; "
                        f"{len(rebuilt)} rebuilt at argmax -> {sorted(set(rebuilt))}")
    assert bounded
    assert exact


@pytest.mark.acceptance(8, "batch output identical for 1 and 8 workers; golden SVGs stable")
def test_determinism(request, cfg, fixture_plays, tmp_path):
    plays = tmp_path / "plays.jsonl"
    with open(plays, "w") as fh:
        write_plays(fixture_plays, fh)
    outputs = []
    for jobs in (1, 8):
        run = tmp_path / f"run{jobs}"
        assert cli_main(["batch", "--plays", str(plays), "--jobs", str(jobs), "--run-dir", str(run)]) == 0
        outputs.append((run / "evaluations.jsonl").read_bytes())
    same_batch = outputs[0] == outputs[1]

    rows = [json.loads(line) for line in outputs[0].decode().splitlines()]
    snap = fixture_plays[0].snapshot
    grid = control_grid(snap, 5.0, 0.0, cfg)
    figures = {
        "control.svg": lambda: heatmap_svg(grid.xs, grid.ys, grid.values, cfg, "Rink control", snapshot=snap),
        "summary.svg": lambda: summary_svg(decision_summary(rows), outcome_summary(rows)),
    }
    stable = True
    for name, render in figures.items():
        first, second = render(), render()
        if os.environ.get("UPDATE_GOLDEN"):
            GOLDEN.mkdir(exist_ok=True)
            (GOLDEN / name).write_text(first)
        golden = (GOLDEN / name).read_text()
        stable &= first == second == golden

    ok = same_batch and stable
    report(request, ok, f"batch identical: {same_batch}; golden SVGs match: {stable}")
    assert same_batch
    assert stable


@pytest.mark.acceptance(9, "one play under 500 ms; 12-play batch under 5 s")
def test_performance(request, cfg, fixture_plays, tmp_path):
    play = fixture_plays[0]
    assert len(play.snapshot.players) >= 10
    evaluate_play(play, cfg)  # warm-up
    single = min(_timed(lambda: evaluate_play(play, cfg)) for _ in range(3))

    plays = tmp_path / "plays.jsonl"
    with open(plays, "w") as fh:
        write_plays(fixture_plays, fh)
    batch = _timed(lambda: cli_main(["batch", "--plays", str(plays), "--run-dir", str(tmp_path / "r")]))
    ok = single < 0.5 and batch < 5.0
    report(request, ok, f"single play {single * 1000:.0f} ms, batch of {len(fixture_plays)} {batch:.2f} s")
    assert single < 0.5
    assert batch < 5.0


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start
