"""
Local times of one-dimensional lattice paths.

A `ComponentPath` is a single coordinate of a walk (or a 1-D simple random
walk). Its local time at site k up to time s is the total holding time at k
before s; rescaled by T it becomes an occupation density on the grid
k / sqrt(T).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from linewalk.core.errors import domain_exception, horizon_exception

logger = logging.getLogger(__name__)


@dataclass
class ComponentPath:
    """Piecewise-constant integer path: sites[i] held on [times[i-1], times[i])."""
    jump_times: np.ndarray
    sites: np.ndarray
    horizon: float

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.shape[0])

    def site_at(self, t):
        """Site occupied at time(s) t."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t > self.horizon * (1 + 1e-12)):
            raise horizon_exception(float(np.max(t)), self.horizon)
        return self.sites[np.searchsorted(self.jump_times, t, side="right")]


def simulate_srw(horizon: float, gen: np.random.Generator,
                 start: Optional[ComponentPath] = None) -> ComponentPath:
    """Continuous-time simple random walk on Z, rate 1 to each neighbour.

    Jump times on (h0, horizon] are the order statistics of a Poisson number
    of uniforms. Passing `start` extends that path, so a path can be grown
    without changing its past.
    """
    h0 = 0.0 if start is None else start.horizon
    x0 = 0 if start is None else int(start.sites[-1])
    if not horizon >= h0:
        raise domain_exception("horizon", horizon, f"horizon >= {h0}")
    n = int(gen.poisson(2.0 * (horizon - h0)))
    times = np.sort(gen.uniform(h0, horizon, size=n))
    steps = 2 * gen.integers(0, 2, size=n, dtype=np.int64) - 1
    sites = x0 + np.concatenate(([0], np.cumsum(steps)))
    if start is None:
        return ComponentPath(times, sites.astype(np.int64), float(horizon))
    return ComponentPath(
        np.concatenate((start.jump_times, times)),
        np.concatenate((start.sites, sites[1:])).astype(np.int64),
        float(horizon),
    )


@dataclass
class LocalTimeField:
    """Raw holding times per site at each requested time T*t.

    `site_times[i, j]` is the holding time at `sites[j]` before T * t_grid[i].
    """
    scale: float
    t_grid: np.ndarray
    sites: np.ndarray
    site_times: np.ndarray

    @property
    def rescaled(self) -> np.ndarray:
        """l^T_t(k / sqrt T) = T**-0.5 * holding time."""
        return self.site_times / np.sqrt(self.scale)

    def mass(self, t_index: int) -> float:
        """Sum over sites of the rescaled local time; equals sqrt(T) * t."""
        return float(np.sum(self.rescaled[t_index]))

    def at_site(self, t_index: int, k: int) -> float:
        j = np.searchsorted(self.sites, k)
        if j < self.sites.shape[0] and self.sites[j] == k:
            return float(self.rescaled[t_index, j])
        return 0.0

    def ell(self, t_index: int, x: float) -> float:
        """l^T_t(x) = l^T_t at site floor(sqrt(T) x)."""
        return self.at_site(t_index, int(np.floor(np.sqrt(self.scale) * x)))

    def interpolated(self, t_index: int, x: float) -> float:
        """Linear interpolation in space between neighbouring grid sites."""
        y = np.sqrt(self.scale) * x
        k = int(np.floor(y))
        frac = y - k
        return (1.0 - frac) * self.at_site(t_index, k) + frac * self.at_site(t_index, k + 1)


def local_times(path: ComponentPath, scale: float, t_grid: Sequence[float],
                x_window: Optional[Tuple[float, float]] = None) -> LocalTimeField:
    """Holding times of a 1-D path at each site, snapshotted at T * t_grid.

    Args:
        path: One coordinate of a trajectory, or an SRW path.
        scale: The scale T >= 1.
        t_grid: Times t in rescaled units; the path must cover T * max(t).
        x_window: Optional (lo, hi) in rescaled space; sites outside are dropped.

    Returns:
        LocalTimeField over the visited sites.
    """
    if not scale >= 1:
        raise domain_exception("T", scale, "T >= 1")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    cutoffs = scale * t_grid
    if cutoffs.size and cutoffs.max() > path.horizon * (1 + 1e-12):
        raise horizon_exception(float(cutoffs.max()), path.horizon)

    starts = np.concatenate(([0.0], path.jump_times))
    ends = np.concatenate((path.jump_times, [path.horizon]))
    lo = int(path.sites.min())
    offsets = path.sites - lo
    width = int(path.sites.max()) - lo + 1

    site_times = np.empty((t_grid.shape[0], width), dtype=np.float64)
    for i, cutoff in enumerate(cutoffs):
        durations = np.clip(np.minimum(ends, cutoff) - starts, 0.0, None)
        site_times[i] = np.bincount(offsets, weights=durations, minlength=width)

    sites = np.arange(lo, lo + width, dtype=np.int64)
    if x_window is not None:
        positions = sites / np.sqrt(scale)
        keep = (positions >= x_window[0]) & (positions <= x_window[1])
        sites, site_times = sites[keep], site_times[:, keep]
    return LocalTimeField(scale=float(scale), t_grid=t_grid, sites=sites, site_times=site_times)
