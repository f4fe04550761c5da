from __future__ import annotations

import math

import pytest

from rinkpass.core import Config, PlayerState, Snapshot, Team
from rinkpass.ingestion import build_pass_plays, parse_events, parse_tracking
from rinkpass.synthetic import write_synthetic

_criteria: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def cfg() -> Config:
    return Config()


@pytest.fixture(scope="session")
def fixture_files(tmp_path_factory):
    return write_synthetic(tmp_path_factory.mktemp("synthetic"))


@pytest.fixture(scope="session")
def fixture_plays(fixture_files):
    tracking, events = fixture_files
    with open(tracking) as t, open(events) as e:
        tr, ev = parse_tracking(t), parse_events(e)
    plays, _ = build_pass_plays(tr.records, ev.records, Config(), tr.has_goalie_column)
    return plays


def player(pid: str, team: str, x: float, y: float, vx: float = 0.0, vy: float = 0.0,
           goalie: bool = False) -> PlayerState:
    return PlayerState(pid, Team(team), (x, y), (vx, vy), goalie)


def snapshot(players, puck=None, passer=None) -> Snapshot:
    players = tuple(players)
    passer = passer or players[0].player_id
    if puck is None:
        puck = next(p.position for p in players if p.player_id == passer)
    return Snapshot(players, puck, passer)


def random_snapshot(rng, n_off: int = 5, n_def: int = 5, goalie: bool = True) -> Snapshot:
    """Players scattered over the attacking zone; the first attacker carries the puck."""
    ps = []
    for k in range(n_off):
        ps.append(player(f"o{k}", "offence", rng.uniform(130, 195), rng.uniform(5, 80),
                         *rng.normal(0, 10, 2)))
    for k in range(n_def):
        ps.append(player(f"d{k}", "defence", rng.uniform(130, 195), rng.uniform(5, 80),
                         *rng.normal(0, 10, 2)))
    if goalie:
        ps.append(player("g", "defence", rng.uniform(184, 189), rng.uniform(38, 47), goalie=True))
    return snapshot(ps)


def bearing(a, b) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0])


# acceptance reporting: each criterion test carries @pytest.mark.acceptance(n, "title")

def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    n, title = props["criterion"]
    _criteria[n] = ("PASS" if report.passed else "FAIL", title, props.get("detail", ""))


@pytest.fixture(autouse=True)
def _tag_criterion(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None and marker.args:
        request.node.user_properties.append(("criterion", tuple(marker.args)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, title, detail = _criteria[n]
        line = f"{status} criterion {n}: {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)
