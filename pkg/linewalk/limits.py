"""
Samplers for the limit objects: Brownian motion, the Kesten-Spitzer clock
Delta(t) = int L_t(x) dH(x) and its inverse, and the two limit pairs

    conv   (B1(Delta(t)), B2(t))
    fin    (B1(t), B2(Delta^{-1}(t)))

Delta is sampled through its finite-T approximant: the local times of a
simple random walk run to time T*t, integrated against the increments of an
independent stable subordinator on the mesh 1/sqrt(T).
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from linewalk.core.errors import domain_exception, clock_range_exception, horizon_exception
from linewalk.core.rng import DEFAULT_SEED, STREAM_TAGS, derive_seed, stream_generator
from linewalk.envgen import DEFAULT_MESH, SubordinatorPath
from linewalk.local_times import ComponentPath, simulate_srw

logger = logging.getLogger(__name__)

# --- Configuration ---
SQRT2 = float(np.sqrt(2.0))
DEFAULT_T_PROXY = 2.0 ** 14
DEFAULT_BIN_WIDTH = 2.0 ** -6
SRW_ROUTE = "srw_route"
BM_ROUTE = "binned_bm_route"
COARSE_GRID_FRACTION = 0.05


@dataclass
class KSProcessSample:
    t_grid: np.ndarray
    values: np.ndarray
    alpha: float
    provenance: str = SRW_ROUTE

    def is_strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0))


@dataclass
class LimitPairSample:
    t_grid: np.ndarray
    first: np.ndarray
    second: np.ndarray
    kind: str
    clock: Optional[np.ndarray] = field(default=None, repr=False)


def _check_grid(t_grid: Sequence[float]) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size < 2 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise domain_exception("t_grid", t_grid.tolist(), "an increasing grid starting at 0")
    return t_grid


def brownian_path(t_grid: Sequence[float], stream: int, seed: int = DEFAULT_SEED,
                  diffusion: float = SQRT2, purpose: str = "brownian_b1") -> np.ndarray:
    """Brownian motion with diffusion coefficient `diffusion` on t_grid (variance diffusion**2 * t)."""
    t_grid = _check_grid(t_grid)
    gen = stream_generator(seed, purpose, stream)
    steps = gen.normal(0.0, 1.0, size=t_grid.size - 1) * diffusion * np.sqrt(np.diff(t_grid))
    return np.concatenate(([0.0], np.cumsum(steps)))


def sample_subordinator(alpha: float, stream: int, seed: int = DEFAULT_SEED,
                        mesh: float = DEFAULT_MESH) -> SubordinatorPath:
    """A fresh subordinator path for sample `stream`, independent of every walk stream."""
    return SubordinatorPath(alpha, mesh, derive_seed(seed, STREAM_TAGS["subordinator"], stream))


def ks_from_component(path: ComponentPath, subordinator: SubordinatorPath, scale: float,
                      t_grid: Sequence[float]) -> np.ndarray:
    """Sum over sites of l^T_t(k) times the subordinator increment of site k.

    With `path` the vertical coordinate of the Y walk (or any rate-1 SRW) this
    is exactly D^T(t) = T**-delta int_0^{Tt} H^T(Y2(s)) ds.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    cutoffs = scale * t_grid
    if cutoffs.max() > path.horizon * (1 + 1e-12):
        raise horizon_exception(float(cutoffs.max()), path.horizon)
    lo, hi = int(path.sites.min()), int(path.sites.max()) + 1
    increments = subordinator.site_increments(scale, lo, hi)[path.sites - lo] / np.sqrt(scale)
    # piecewise linear between jumps, so interpolation is exact
    knots = np.concatenate(([0.0], path.jump_times, [path.horizon]))
    cumulative = np.concatenate(([0.0], np.cumsum(increments * np.diff(knots))))
    return np.interp(cutoffs, knots, cumulative)


def _bm_route(alpha: float, t_grid: np.ndarray, subordinator: SubordinatorPath, stream: int,
              seed: int, bin_width: float, dt: Optional[float]) -> np.ndarray:
    dt = dt or bin_width ** 2 / 4.0
    n_steps = int(np.ceil(t_grid[-1] / dt))
    gen = stream_generator(seed, "brownian_b2", stream)
    steps = gen.normal(0.0, SQRT2 * np.sqrt(dt), size=n_steps)
    path = np.concatenate(([0.0], np.cumsum(steps)))[:-1]
    bins = np.floor(path / bin_width).astype(np.int64)
    lo, hi = int(bins.min()), int(bins.max()) + 1
    increments = subordinator.site_increments(1.0 / bin_width ** 2, lo, hi)
    values = np.empty(t_grid.size, dtype=np.float64)
    for i, t in enumerate(t_grid):
        upto = int(round(t / dt))
        occupation = np.bincount(bins[:upto] - lo, minlength=hi - lo) * (dt / bin_width)
        values[i] = occupation @ increments
    return values


def ks_sample(alpha: float, t_grid: Sequence[float], stream: int, seed: int = DEFAULT_SEED,
              t_proxy: float = DEFAULT_T_PROXY, route: str = SRW_ROUTE, mesh: float = DEFAULT_MESH,
              bin_width: float = DEFAULT_BIN_WIDTH, bm_dt: Optional[float] = None,
              subordinator: Optional[SubordinatorPath] = None) -> KSProcessSample:
    """One sample path of the Kesten-Spitzer process on t_grid.

    Args:
        alpha: Subordinator index in (0, 1).
        t_grid: Increasing times starting at 0.
        stream: Sample index.
        seed: Base seed.
        t_proxy: Discretisation scale T; 1/sqrt(T) must be a multiple of `mesh`.
        route: 'srw_route' (default) or 'binned_bm_route' (cross-check).
        mesh: Subordinator mesh.
        bin_width: Spatial bin of the Brownian occupation estimate.
        bm_dt: Brownian time step (default bin_width**2 / 4).
        subordinator: A fixed path to integrate against (quenched use); by
            default every stream draws its own.

    Returns:
        KSProcessSample tagged with its route.
    """
    if not 0 < alpha < 1:
        raise domain_exception("alpha", alpha, "0 < alpha < 1")
    t_grid = _check_grid(t_grid)
    subordinator = subordinator or sample_subordinator(alpha, stream, seed, mesh)
    if route == SRW_ROUTE:
        subordinator.cells_per_site(t_proxy)
        gen = stream_generator(seed, "srw", stream)
        path = simulate_srw(t_proxy * t_grid[-1], gen)
        values = ks_from_component(path, subordinator, t_proxy, t_grid)
    elif route == BM_ROUTE:
        values = _bm_route(alpha, t_grid, subordinator, stream, seed, bin_width, bm_dt)
    else:
        raise domain_exception("route", route, f"'{SRW_ROUTE}' or '{BM_ROUTE}'")
    return KSProcessSample(t_grid, values, alpha, route)


def invert_ks(sample: KSProcessSample, u):
    """Delta^{-1}(u) by linear interpolation between grid knots."""
    u = np.asarray(u, dtype=np.float64)
    top = float(sample.values[-1])
    if np.any(u < 0) or np.any(u > top):
        raise clock_range_exception(float(np.max(np.abs(u))), top)
    step = float(np.max(np.diff(sample.values)))
    if step > COARSE_GRID_FRACTION * top:
        logger.warning(f"Delta grid is coarse: step {step!r} exceeds {COARSE_GRID_FRACTION:.0%} "
                       f"of Delta(t_max)={top!r}; inverse is rough")
    out = np.interp(u, sample.values, sample.t_grid)
    return float(out) if out.ndim == 0 else out


def _proxy_walk(scale: float, horizon: float, stream: int, seed: int) -> ComponentPath:
    return simulate_srw(scale * horizon, stream_generator(seed, "srw", stream))


def limit_pair(alpha: float, t_grid: Sequence[float], stream: int, seed: int = DEFAULT_SEED,
               t_proxy: float = DEFAULT_T_PROXY, mesh: float = DEFAULT_MESH,
               subordinator: Optional[SubordinatorPath] = None) -> LimitPairSample:
    """(B1(Delta(t)), B2(t)) with B2 proxied by the rescaled SRW that also drives Delta."""
    t_grid = _check_grid(t_grid)
    subordinator = subordinator or sample_subordinator(alpha, stream, seed, mesh)
    walk = _proxy_walk(t_proxy, t_grid[-1], stream, seed)
    delta = ks_from_component(walk, subordinator, t_proxy, t_grid)
    b2 = walk.site_at(t_proxy * t_grid) / np.sqrt(t_proxy)

    gen = stream_generator(seed, "brownian_b1", stream)
    steps = gen.normal(0.0, 1.0, size=t_grid.size - 1) * SQRT2 * np.sqrt(np.diff(delta))
    b1_of_delta = np.concatenate(([0.0], np.cumsum(steps)))
    return LimitPairSample(t_grid, b1_of_delta, b2.astype(np.float64), "conv", clock=delta)


def fin_pair(alpha: float, t_grid: Sequence[float], stream: int, seed: int = DEFAULT_SEED,
             t_proxy: float = DEFAULT_T_PROXY, mesh: float = DEFAULT_MESH,
             fine_points: int = 4096, subordinator: Optional[SubordinatorPath] = None) -> LimitPairSample:
    """(B1(t), B2(Delta^{-1}(t))): Brownian motion and the FIN diffusion."""
    t_grid = _check_grid(t_grid)
    subordinator = subordinator or sample_subordinator(alpha, stream, seed, mesh)
    subordinator.cells_per_site(t_proxy)
    gen = stream_generator(seed, "srw", stream)

    span = 1.0
    walk = simulate_srw(t_proxy * span, gen)
    while True:
        s_grid = np.linspace(0.0, span, fine_points + 1)
        delta = ks_from_component(walk, subordinator, t_proxy, s_grid)
        if delta[-1] >= t_grid[-1]:
            break
        span *= 2.0
        walk = simulate_srw(t_proxy * span, gen, start=walk)

    clock = KSProcessSample(s_grid, delta, alpha)
    inverse = invert_ks(clock, t_grid)
    b2_of_inverse = walk.site_at(t_proxy * inverse) / np.sqrt(t_proxy)
    b1 = brownian_path(t_grid, stream, seed, purpose="brownian_b1")
    return LimitPairSample(t_grid, b1, b2_of_inverse.astype(np.float64), "fin", clock=inverse)
