"""
Additive functionals ("clocks") of trajectories and exact time changes.

A clock C(t) = scale_post * int_0^{scale_pre t} w(X(s)) ds is piecewise
linear with one knot per jump, so it is stored exactly and inverted in
closed form on each segment. Clocks are stored without the factor 2 of the
quadratic variation; callers apply it (e.g. <X1>(t) = 2 * A1^H(t)).
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from linewalk.core.errors import (
    clock_mismatch_exception,
    clock_range_exception,
    domain_exception,
    horizon_exception,
)
from linewalk.envgen import Environment, LineField
from linewalk.walker import Trajectory

logger = logging.getLogger(__name__)

Weight = Callable[[np.ndarray], np.ndarray]


@dataclass
class ClockSample:
    """knot_times start at 0; slopes[i] applies on [knot_times[i], next knot)."""
    knot_times: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    horizon: float
    time_scale: float = 1.0

    @property
    def final_value(self) -> float:
        return float(self.values[-1] + self.slopes[-1] * (self.horizon - self.knot_times[-1]))

    def value(self, t):
        """Clock value at time(s) t in [0, horizon]."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise horizon_exception(float(np.max(t)), self.horizon)
        i = np.searchsorted(self.knot_times, t, side="right") - 1
        out = self.values[i] + self.slopes[i] * (t - self.knot_times[i])
        return float(out) if out.ndim == 0 else out

    def inverse(self) -> "ClockSample":
        """The inverse clock, whose knots are this clock's values."""
        return ClockSample(
            knot_times=self.values.copy(),
            values=self.knot_times.copy(),
            slopes=1.0 / self.slopes,
            horizon=self.final_value,
            time_scale=1.0,
        )


# --- Weights ---

def _lookup(field: LineField, coords: np.ndarray) -> np.ndarray:
    lo, hi = int(coords.min()), int(coords.max()) + 1
    return field.window(lo, hi)[coords - lo]


def unit_weight(positions: np.ndarray) -> np.ndarray:
    return np.ones(positions.shape[0], dtype=np.float64)


def horizontal_weight(env: Environment) -> Weight:
    """H(x2), the integrand of A1^H."""
    return lambda positions: _lookup(env.horizontal, positions[:, 1])


def vertical_weight(env: Environment) -> Weight:
    """V(x1), the integrand of A2^V."""
    return lambda positions: _lookup(env.vertical, positions[:, 0])


def monomial_weight(env: Environment, p: float, q: float) -> Weight:
    """H(x2)**p * V(x1)**q; exponents 0 and +-1 are applied exactly."""
    def weight(positions: np.ndarray) -> np.ndarray:
        h = _lookup(env.horizontal, positions[:, 1])
        v = _lookup(env.vertical, positions[:, 0])
        out = np.ones_like(h) if p == 0 else (h if p == 1 else h ** p)
        if q == 1:
            out = out * v
        elif q == -1:
            out = out / v
        elif q != 0:
            out = out * v ** q
        return out
    return weight


def csrw_weight(env: Environment) -> Weight:
    """V(x1) + H(x2), the integrand of J."""
    return lambda positions: _lookup(env.horizontal, positions[:, 1]) + _lookup(env.vertical, positions[:, 0])


# --- Operations ---

def additive_functional(traj: Trajectory, weight: Weight, scale_pre: float = 1.0,
                        scale_post: float = 1.0, t_max: Optional[float] = None) -> ClockSample:
    """Exact clock scale_post * int_0^{scale_pre t} weight(X(s)) ds.

    Args:
        traj: The trajectory the clock integrates along.
        weight: Site function evaluated on the (n+1, 2) position array.
        scale_pre: Time factor; clock time t corresponds to path time scale_pre * t.
        scale_post: Value factor.
        t_max: If given, the clock must be defined up to t_max.

    Returns:
        ClockSample with one knot per jump.
    """
    if t_max is not None and traj.horizon < scale_pre * t_max * (1 - 1e-12):
        raise horizon_exception(scale_pre * t_max, traj.horizon)
    w = np.asarray(weight(traj.positions), dtype=np.float64)
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise domain_exception("weight", "nonpositive", "weight > 0 on visited sites")
    knots = np.concatenate(([0.0], traj.jump_times))
    holds = np.diff(knots)
    cumulative = np.concatenate(([0.0], np.cumsum(w[:-1] * holds)))
    return ClockSample(
        knot_times=knots / scale_pre,
        values=scale_post * cumulative,
        slopes=scale_post * scale_pre * w,
        horizon=traj.horizon / scale_pre,
        time_scale=scale_pre,
    )


def invert_clock(clock: ClockSample, u):
    """Exact inverse of a strictly increasing piecewise-linear clock."""
    u = np.asarray(u, dtype=np.float64)
    attained = clock.final_value
    if np.any(u < 0) or np.any(u > attained * (1 + 1e-12)):
        bad = float(u[(u < 0) | (u > attained)].flat[0]) if u.ndim else float(u)
        raise clock_range_exception(bad, attained)
    i = np.searchsorted(clock.values, u, side="right") - 1
    out = clock.knot_times[i] + (u - clock.values[i]) / clock.slopes[i]
    return float(out) if out.ndim == 0 else out


def time_change(traj: Trajectory, clock: ClockSample) -> Trajectory:
    """The path t -> X(clock^{-1}(t)): same positions, jump times mapped through the clock."""
    if clock.knot_times.shape[0] != traj.n_jumps + 1:
        raise clock_mismatch_exception(int(clock.knot_times.shape[0]), traj.n_jumps)
    raw = clock.knot_times[1:] * clock.time_scale
    if not np.allclose(raw, traj.jump_times, rtol=1e-12, atol=0.0):
        raise clock_mismatch_exception(int(clock.knot_times.shape[0]), traj.n_jumps)
    return Trajectory(
        jump_times=clock.values[1:].copy(),
        positions=traj.positions,
        horizon=clock.final_value,
        truncated=traj.truncated,
        kind=traj.kind,
    )
