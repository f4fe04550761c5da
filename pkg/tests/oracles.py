"""Independent reference implementations used to check the closed forms.

Nothing here imports the package's numerics: the ODEs are integrated with a
plain fixed-step RK4 and the pick-up process is simulated directly.
"""

from __future__ import annotations

import math

import numpy as np


def rk4(deriv, y0: np.ndarray, t_end: np.ndarray | float, steps: int) -> np.ndarray:
    """Integrate ``y' = deriv(y)`` from 0 to ``t_end`` (broadcast per row) in ``steps`` steps."""
    y = np.array(y0, dtype=float)
    h = np.asarray(t_end, dtype=float) / steps
    if h.ndim:
        h = h[:, None]
    for _ in range(steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * h * k1)
        k3 = deriv(y + 0.5 * h * k2)
        k4 = deriv(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def player_rk4(pos, vel, phi, t, gamma, v_max, t_reaction, steps=2000) -> np.ndarray:
    """Positions of players that coast for ``t_reaction`` then accelerate toward ``phi``.

    All arguments are per-player arrays; returns an (N, 2) array.
    """
    pos = np.asarray(pos, dtype=float)
    vel = np.asarray(vel, dtype=float)
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    coast = np.minimum(t, t_reaction)
    state = np.hstack([pos + vel * coast[:, None], vel])
    target = np.stack([np.cos(phi), np.sin(phi)], axis=1) * v_max

    def deriv(s):
        return np.hstack([s[:, 2:], gamma * (target - s[:, 2:])])

    out = rk4(deriv, state, np.maximum(t - t_reaction, 0.0), steps)
    return out[:, :2]


def puck_rk4(pos, vel, t, kappa, mu, steps=2000) -> np.ndarray:
    """Puck positions under linear drag plus constant friction, before it stops."""
    state = np.hstack([np.asarray(pos, dtype=float), np.asarray(vel, dtype=float)])

    def deriv(s):
        v = s[:, 2:]
        speed = np.linalg.norm(v, axis=1, keepdims=True)
        return np.hstack([v, -kappa * v - mu * v / speed])

    return rk4(deriv, state, np.asarray(t, dtype=float), steps)[:, :2]


def normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def base_pickup_reference(d: float, t: float, t_intercept: float, s: float, dt: float, window: float) -> float:
    return (normal_cdf((d + s) / s) - normal_cdf((d - s) / s)) * math.exp(-t / t_intercept) * dt / window


def simulate_pickups(base: np.ndarray, dist: np.ndarray, trials: int, rng: np.random.Generator):
    """Play the sequential pick-up game ``trials`` times.

    At each sample players try in order of distance (ties by row index); the
    first success ends the pass.  Returns per-player pick-up frequencies and
    the fraction of passes nobody collected.
    """
    n, m = base.shape
    counts = np.zeros(n)
    alive = np.ones(trials, dtype=bool)
    for j in range(m):
        order = sorted(range(n), key=lambda i: (dist[i, j], i))
        for i in order:
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            hit = rng.random(idx.size) < base[i, j]
            counts[i] += hit.sum()
            alive[idx[hit]] = False
    return counts / trials, alive.mean()
