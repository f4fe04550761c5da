import math

import numpy as np
import pytest
from conftest import player, snapshot
from hypothesis import given
from hypothesis import strategies as st

from rinkpass.core import Config, Triplet
from rinkpass.scoring import (location_value, location_value_grid, raw_scoring_probability,
                              scoring_grid, scoring_probability)


def reference_scoring(x, y):
    # direct evaluation with the default constants
    raw = math.exp(-((x - 189) ** 2 / 2000 + (y - 42.5) ** 2 / 500))
    dist = math.hypot(x - 189, y - 42.5)
    sin_t = 1.0 if dist == 0 else abs(x - 189) / dist
    return raw * (sin_t + 1) / (4 if x < 189 else 8)


@pytest.mark.parametrize("x, y, expected", [
    (189, 42.5, 1.0),
    (180, 42.5, math.exp(-81 / 2000)),
    (100, 42.5, math.exp(-89 ** 2 / 2000)),
])
def test_raw_surface(cfg, x, y, expected):
    assert raw_scoring_probability(x, y, cfg) == pytest.approx(expected, rel=1e-14)


def test_raw_rounded_values(cfg):
    assert raw_scoring_probability(180, 42.5, cfg) == pytest.approx(0.9603, abs=5e-5)
    assert raw_scoring_probability(100, 42.5, cfg) == pytest.approx(0.0191, abs=5e-5)


@pytest.mark.parametrize("x, y, rounded", [(180, 42.5, 0.4801), (189, 20, 0.0454), (195, 42.5, 0.2456)])
def test_angle_penalty(cfg, x, y, rounded):
    got = scoring_probability(x, y, cfg)
    assert got == pytest.approx(reference_scoring(x, y), rel=1e-13)
    assert got == pytest.approx(rounded, abs=1e-4)  # examples are quoted to four places


def test_goal_centre_is_finite(cfg):
    assert scoring_probability(189, 42.5, cfg) == pytest.approx(0.25)


@given(st.floats(0, 200), st.floats(0, 42.5))
def test_mirror_symmetry_about_goal_axis(x, d):
    cfg = Config()
    assert scoring_probability(x, 42.5 + d, cfg) == pytest.approx(scoring_probability(x, 42.5 - d, cfg),
                                                                  rel=1e-12, abs=1e-300)


@given(st.floats(0, 200), st.floats(0, 85))
def test_bounds(x, y):
    cfg = Config()
    p = scoring_probability(x, y, cfg)
    assert 0 <= p <= (0.5 if x < 189 else 0.25)
    assert p == pytest.approx(reference_scoring(x, y), rel=1e-12, abs=1e-300)


def test_vectorised_matches_scalar(cfg):
    xs, ys, grid = scoring_grid(5.0, cfg)
    for r in (0, 5, 16):
        for c in (0, 20, 39):
            assert grid[r, c] == scoring_probability(xs[c], ys[r], cfg)


def test_location_value_examples(cfg):
    everyone_attacks = snapshot([player("a", "offence", 150, 40), player("b", "offence", 170, 20)])
    tr = Triplet(175, 45, 0.4)
    assert location_value(everyone_attacks, tr, cfg) == scoring_probability(175, 45, cfg)

    one_on_one = snapshot([player("a", "offence", 180, 32.5), player("b", "defence", 180, 52.5)])
    assert location_value(one_on_one, Triplet(180, 42.5, 0.0), cfg) == pytest.approx(
        0.5 * reference_scoring(180, 42.5), abs=1e-12)
    assert location_value(one_on_one, Triplet(180, 42.5, 0.0), cfg) == pytest.approx(0.2401, abs=5e-5)


def test_defence_controlled_rink_has_no_value(cfg):
    snap = snapshot([player("a", "offence", 20, 40)] + [
        player(f"d{k}", "defence", 175 + k, 40 + k) for k in range(5)
    ], puck=(20, 40))
    assert location_value(snap, Triplet(180, 42.5, 0.0), cfg) < 1e-3


def test_location_value_never_exceeds_scoring(cfg):
    snap = snapshot([player("a", "offence", 150, 40), player("d", "defence", 170, 40)])
    xs, ys, lv = location_value_grid(snap, 5.0, 0.0, cfg)
    _, _, sc = scoring_grid(5.0, cfg)
    assert np.all(lv <= sc)
