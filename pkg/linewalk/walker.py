"""
Continuous-time walks on the line-model environment.

Four walks share one event-driven kernel and differ only in their rates:

    VSRW   (H(x2), V(x1))
    CSRW   (H/(H+V), V/(H+V))
    Y      (H/V, 1)
    XSTAR  (H**(1-a1m) V**(-a2m), H**(-a1m) V**(1-a2m))

Each rate is per direction, so the total jump rate is 2*(h+v).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from linewalk import kernels
from linewalk.core.errors import domain_exception, horizon_exception
from linewalk.core.rng import open_uniform, stream_generator
from linewalk.envgen import Environment, EnvironmentSpec
from linewalk.local_times import ComponentPath

logger = logging.getLogger(__name__)

# --- Configuration ---
DEFAULT_JUMP_CAP = 10_000_000
UNIFORM_BATCH = 1 << 16
INITIAL_RADIUS = 64
INITIAL_CAPACITY = 4096

WALK_TAGS = tuple(kernels.KIND_CODES)


@dataclass(frozen=True)
class WalkKind:
    """Which walk to run; XSTAR carries its two exponents."""
    tag: str = "VSRW"
    alpha1_minus: Optional[float] = None
    alpha2_minus: Optional[float] = None

    def __post_init__(self):
        if self.tag not in kernels.KIND_CODES:
            raise domain_exception("walk_kind", self.tag, f"one of {WALK_TAGS}")
        if self.tag == "XSTAR" and (self.alpha1_minus is None or self.alpha2_minus is None):
            raise domain_exception("walk_kind", self.tag, "XSTAR requires alpha1_minus and alpha2_minus")

    @property
    def code(self) -> int:
        return kernels.KIND_CODES[self.tag]

    @property
    def exponents(self) -> Tuple[float, float]:
        return (self.alpha1_minus or 0.0, self.alpha2_minus or 0.0)

    def check_against(self, spec: EnvironmentSpec) -> None:
        """XSTAR exponents must lie strictly inside (0, alpha_i)."""
        if self.tag != "XSTAR":
            return
        if not 0 < self.alpha1_minus < spec.alpha1:
            raise domain_exception("alpha1_minus", self.alpha1_minus, f"0 < alpha1_minus < alpha1={spec.alpha1}")
        if not 0 < self.alpha2_minus < spec.alpha2:
            raise domain_exception("alpha2_minus", self.alpha2_minus, f"0 < alpha2_minus < alpha2={spec.alpha2}")


VSRW = WalkKind("VSRW")
CSRW = WalkKind("CSRW")
Y_WALK = WalkKind("Y")


@dataclass
class Trajectory:
    """Jump times (strictly increasing, after 0) and the n+1 visited points."""
    jump_times: np.ndarray
    positions: np.ndarray
    horizon: float
    truncated: bool = False
    kind: str = "VSRW"

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.shape[0])

    def position_at(self, t: float) -> np.ndarray:
        if t > self.horizon * (1 + 1e-12):
            raise horizon_exception(t, self.horizon)
        return self.positions[np.searchsorted(self.jump_times, t, side="right")]

    def component(self, index: int) -> ComponentPath:
        """Coordinate `index` (0 for x1, 1 for x2) as a 1-D path."""
        return ComponentPath(self.jump_times, self.positions[:, index].copy(), self.horizon)

    def is_nearest_neighbour(self) -> bool:
        steps = np.abs(np.diff(self.positions, axis=0)).sum(axis=1)
        return bool(np.all(steps == 1))


@dataclass
class WalkSummary:
    """Path-free result of a run: endpoint, running maxima, exact integrals."""
    final_position: Tuple[int, int]
    max_abs: Tuple[int, int]
    jumps: int
    elapsed: float
    truncated: bool
    integrals: Dict[Tuple[float, float], float] = field(default_factory=dict)


def rates_at(env: Environment, kind: WalkKind, x: Sequence[int]) -> Tuple[float, float]:
    """(horizontal, vertical) per-direction rates at lattice point x."""
    h = env.H(int(x[1]))
    v = env.V(int(x[0]))
    a1m, a2m = kind.exponents
    rh, rv = kernels.rates(kind.code, h, v, a1m, a2m)
    return float(rh), float(rv)


def _run(env: Environment, kind: WalkKind, start: Sequence[int], horizon: float,
         jump_limit: int, stream: int, record: bool, powers: np.ndarray):
    kind.check_against(env.spec)
    gen = stream_generator(env.spec.seed, "walk", stream)
    uniforms = open_uniform(gen, UNIFORM_BATCH)

    state = np.array([int(start[0]), int(start[1]), 0, 0, 0], dtype=np.int64)
    clock = np.zeros(1, dtype=np.float64)
    integrals = np.zeros(powers.shape[0], dtype=np.float64)
    max_abs = np.array([abs(int(start[0])), abs(int(start[1]))], dtype=np.int64)

    capacity = min(jump_limit, INITIAL_CAPACITY) if record else 0
    times_out = np.empty(capacity, dtype=np.float64)
    pos_out = np.empty((capacity, 2), dtype=np.int64)

    radius = max(INITIAL_RADIUS, 2 * int(max_abs.max()))
    h_win, v_win = env.window(radius)
    a1m, a2m = kind.exponents

    while True:
        status = kernels.advance(
            kind.code, a1m, a2m, h_win, v_win, radius, state, clock, horizon, jump_limit,
            uniforms, powers, integrals, max_abs, record, times_out, pos_out,
        )
        if status == kernels.STATUS_WINDOW:
            radius *= 2
            logger.debug(f"Walk left the window; growing radius to {radius}")
            h_win, v_win = env.window(radius)
        elif status == kernels.STATUS_REFILL:
            used = int(state[kernels.U_INDEX])
            uniforms = np.concatenate((uniforms[used:], open_uniform(gen, UNIFORM_BATCH)))
            state[kernels.U_INDEX] = 0
        elif status == kernels.STATUS_BUFFER:
            grown = min(2 * times_out.shape[0], jump_limit)
            times_out = np.concatenate((times_out, np.empty(grown - times_out.shape[0])))
            pos_out = np.concatenate((pos_out, np.empty((grown - pos_out.shape[0], 2), dtype=np.int64)))
        else:
            return status, state, clock, integrals, max_abs, times_out, pos_out


def _jump_limit(max_jumps: Optional[int], jump_cap: int) -> int:
    return jump_cap if max_jumps is None else min(max_jumps, jump_cap)


def simulate(env: Environment, kind: WalkKind, start: Sequence[int] = (0, 0),
             horizon: Optional[float] = None, max_jumps: Optional[int] = None,
             stream: int = 0, jump_cap: int = DEFAULT_JUMP_CAP) -> Trajectory:
    """Simulates one trajectory by the Gillespie scheme.

    Args:
        env: The environment (already rescaled if needed).
        kind: Walk kind.
        start: Initial lattice point.
        horizon: Stop at this physical time.
        max_jumps: Stop after this many jumps (a jump budget, not a truncation).
        stream: Walker stream id; the trajectory is a function of (env seed, stream).
        jump_cap: Hard cap; reaching it before the horizon flags the trajectory truncated.

    Returns:
        The trajectory, valid on [0, horizon].
    """
    if horizon is None and max_jumps is None:
        raise domain_exception("stop", None, "a time horizon or a jump budget")
    if horizon is not None and not horizon > 0:
        raise domain_exception("horizon", horizon, "horizon > 0")
    if max_jumps is not None and not max_jumps > 0:
        raise domain_exception("max_jumps", max_jumps, "max_jumps > 0")

    limit = _jump_limit(max_jumps, jump_cap)
    stop_time = np.inf if horizon is None else float(horizon)
    status, state, clock, _, _, times_out, pos_out = _run(
        env, kind, start, stop_time, limit, stream, True, np.zeros((0, 2)),
    )
    n = int(state[kernels.N_RECORDED])
    positions = np.vstack((np.asarray(start, dtype=np.int64).reshape(1, 2), pos_out[:n]))
    budget_reached = max_jumps is not None and n >= max_jumps
    truncated = status == kernels.STATUS_JUMP_LIMIT and not budget_reached
    if truncated:
        logger.warning(f"{kind.tag} trajectory truncated at {n} jumps, time {clock[0]!r} (stream {stream})")
    valid_until = float(clock[0]) if status == kernels.STATUS_JUMP_LIMIT else stop_time
    return Trajectory(times_out[:n].copy(), positions, valid_until, truncated, kind.tag)


def simulate_summary(env: Environment, kind: WalkKind, horizon: float,
                     powers: Sequence[Tuple[float, float]] = (), stream: int = 0,
                     start: Sequence[int] = (0, 0), jump_cap: int = DEFAULT_JUMP_CAP) -> WalkSummary:
    """Runs a walk to `horizon` without storing the path.

    `powers` lists (p, q) pairs; the summary carries the exact integrals of
    H(x2)**p * V(x1)**q along the path up to the horizon (or the truncation).
    """
    if not horizon > 0:
        raise domain_exception("horizon", horizon, "horizon > 0")
    power_array = np.asarray(powers, dtype=np.float64).reshape(-1, 2)
    status, state, clock, integrals, max_abs, _, _ = _run(
        env, kind, start, float(horizon), jump_cap, stream, False, power_array,
    )
    truncated = status == kernels.STATUS_JUMP_LIMIT
    return WalkSummary(
        final_position=(int(state[kernels.X1]), int(state[kernels.X2])),
        max_abs=(int(max_abs[0]), int(max_abs[1])),
        jumps=int(state[kernels.JUMPS]),
        elapsed=float(clock[0]),
        truncated=bool(truncated),
        integrals={(float(p), float(q)): float(integrals[j]) for j, (p, q) in enumerate(power_array)},
    )


def jump_count(traj: Trajectory, t: float) -> int:
    """Number of jumps in [0, t]."""
    if t > traj.horizon * (1 + 1e-12):
        raise horizon_exception(t, traj.horizon)
    return int(np.searchsorted(traj.jump_times, t, side="right"))


def explosion_probe(env: Environment, kind: WalkKind, t: float, jump_cap: int, stream: int = 0) -> str:
    """'completed' if the walk reaches physical time t within jump_cap jumps, else 'truncated'."""
    summary = simulate_summary(env, kind, t, stream=stream, jump_cap=jump_cap)
    return "truncated" if summary.truncated else "completed"
