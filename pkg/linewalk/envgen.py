"""
Quenched line environments.

The horizontal rate of an edge depends only on its row (H(x2)) and the
vertical rate only on its column (V(x1)). Both line fields are evaluated
lazily, block by block, from counter-based streams, so any finite window of
the environment is a pure function of the seed.
"""
import logging
import threading
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from linewalk.core.errors import (
    configuration_exception,
    domain_exception,
    inadmissible_scale_exception,
)
from linewalk.core.rng import BLOCK_SIZE, DEFAULT_SEED, block_generator, derive_seed, open_uniform

logger = logging.getLogger(__name__)

# --- Configuration ---
PARETO_FLOOR = "pareto_floor"
STABLE_INCREMENTS = "stable_increments"
CONSTANT = "constant"

H_MODES = (PARETO_FLOOR, STABLE_INCREMENTS, CONSTANT)
V_MODES = (PARETO_FLOOR, CONSTANT)
COUPLINGS = ("quenched", "annealed")

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

DEFAULT_MESH = 2.0 ** -8


@dataclass(frozen=True)
class EnvironmentSpec:
    """Law and seed of a line environment.

    In constant mode H takes the value h_floor and V the value v_mean. When
    v_floor is left unset it is derived from v_mean through the Pareto mean
    (alpha2 > 1), or defaults to 1.
    """
    alpha1: float = 0.6
    alpha2: float = 0.9
    h_mode: str = PARETO_FLOOR
    v_mode: str = PARETO_FLOOR
    h_floor: float = 1.0
    v_floor: Optional[float] = None
    v_mean: float = 1.0
    seed: int = DEFAULT_SEED
    h_coupling: str = "quenched"
    mesh: float = DEFAULT_MESH

    def __post_init__(self):
        if not self.alpha1 > 0:
            raise domain_exception("alpha1", self.alpha1, "alpha1 > 0")
        if not self.alpha2 > 0:
            raise domain_exception("alpha2", self.alpha2, "alpha2 > 0")
        if self.v_mode == STABLE_INCREMENTS:
            raise configuration_exception(
                "stable_increments mode is only defined for the horizontal field H.",
                remedy="Use v_mode=pareto_floor or v_mode=constant.",
            )
        if self.h_mode not in H_MODES:
            raise domain_exception("h_mode", self.h_mode, f"one of {H_MODES}")
        if self.v_mode not in V_MODES:
            raise domain_exception("v_mode", self.v_mode, f"one of {V_MODES}")
        if self.h_coupling not in COUPLINGS:
            raise domain_exception("h_coupling", self.h_coupling, f"one of {COUPLINGS}")
        if self.h_floor < 0:
            raise domain_exception("h_floor", self.h_floor, "h_floor >= 0")
        if self.v_floor is not None and self.v_floor < 0:
            raise domain_exception("v_floor", self.v_floor, "v_floor >= 0")
        if self.h_mode in (PARETO_FLOOR, CONSTANT) and not self.h_floor > 0:
            raise domain_exception("h_floor", self.h_floor, f"h_floor > 0 in {self.h_mode} mode")
        if self.h_mode == STABLE_INCREMENTS and not 0 < self.alpha1 < 1:
            raise domain_exception("alpha1", self.alpha1, "0 < alpha1 < 1 in stable_increments mode")
        if not self.v_mean > 0:
            raise domain_exception("v_mean", self.v_mean, "v_mean > 0")
        if self.v_mode == PARETO_FLOOR and not self.resolved_v_floor > 0:
            raise domain_exception("v_floor", self.v_floor, "v_floor > 0 in pareto_floor mode")
        if self.v_mode == PARETO_FLOOR and self.v_mean < self.resolved_v_floor:
            raise domain_exception("v_mean", self.v_mean, f"v_mean >= v_floor={self.resolved_v_floor}")
        if not self.mesh > 0:
            raise domain_exception("mesh", self.mesh, "mesh > 0")
        if not 0 <= self.seed < 2 ** 64:
            raise domain_exception("seed", self.seed, "0 <= seed < 2**64")

    @property
    def resolved_v_floor(self) -> float:
        if self.v_floor is not None:
            return self.v_floor
        if self.alpha2 > 1:
            return self.v_mean * (self.alpha2 - 1) / self.alpha2
        return 1.0

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["resolved_v_floor"] = self.resolved_v_floor
        return data


# --- Samplers ---

def sample_pareto_floor(alpha: float, floor: float, u):
    """Inverse-CDF Pareto draw: floor * u**(-1/alpha).

    Accepts a scalar or an array of uniforms; P(value > L) = (floor/L)**alpha.
    """
    if not alpha > 0:
        raise domain_exception("alpha", alpha, "alpha > 0")
    if not floor > 0:
        raise domain_exception("floor", floor, "floor > 0")
    u = np.asarray(u, dtype=np.float64)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise domain_exception("u", u.tolist() if u.ndim else float(u), "u in (0, 1)")
    value = floor * u ** (-1.0 / alpha)
    return float(value) if value.ndim == 0 else value


def sample_positive_stable(alpha: float, u, e):
    """Kanter / Chambers-Mallows-Stuck draw of a positive alpha-stable variable.

    Args:
        alpha: Stability index in (0, 1).
        u: Uniform variate(s) on (-pi/2, pi/2).
        e: Unit-mean exponential variate(s).

    Returns:
        S with E[exp(-lam * S)] = exp(-lam**alpha).
    """
    if not 0 < alpha < 1:
        raise domain_exception("alpha", alpha, "0 < alpha < 1")
    u = np.asarray(u, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    shifted = alpha * (u + np.pi / 2)
    left = np.sin(shifted) / np.cos(u) ** (1.0 / alpha)
    right = (np.cos(u - shifted) / e) ** ((1.0 - alpha) / alpha)
    value = left * right
    return float(value) if value.ndim == 0 else value


def draw_positive_stable(alpha: float, gen: np.random.Generator, size: int) -> np.ndarray:
    """Draws `size` standard positive stable variables from a generator."""
    u = np.pi * (open_uniform(gen, size) - 0.5)
    e = -np.log(open_uniform(gen, size))
    return sample_positive_stable(alpha, u, e)


def pareto_moment(alpha: float, floor: float, beta: float) -> float:
    """E[X**beta] for X Pareto(alpha, floor); finite only for beta < alpha."""
    if not beta < alpha:
        raise domain_exception("beta", beta, f"beta < alpha={alpha}")
    return alpha * floor ** beta / (alpha - beta)


# --- Subordinator ---

class SubordinatorPath:
    """Two-sided alpha-stable subordinator sampled on a fixed mesh.

    Cell j covers [j*mesh, (j+1)*mesh); its increment has the law of
    mesh**(1/alpha) * S. Cells are generated in blocks from the counter-based
    stream, so negative and positive cells are independent copies glued at 0.
    """

    def __init__(self, alpha: float, mesh: float, seed: int):
        if not 0 < alpha < 1:
            raise domain_exception("alpha", alpha, "0 < alpha < 1")
        if not mesh > 0:
            raise domain_exception("mesh", mesh, "mesh > 0")
        self.alpha = alpha
        self.mesh = mesh
        self.seed = seed
        self._cell_factor = mesh ** (1.0 / alpha)
        self._blocks: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def _block(self, block: int) -> np.ndarray:
        with self._lock:
            cached = self._blocks.get(block)
            if cached is None:
                gen = block_generator(self.seed, "subordinator", block)
                cached = self._cell_factor * draw_positive_stable(self.alpha, gen, BLOCK_SIZE)
                self._blocks[block] = cached
            return cached

    def increments(self, lo: int, hi: int) -> np.ndarray:
        """Increments of cells lo .. hi-1."""
        if hi <= lo:
            return np.empty(0, dtype=np.float64)
        first, last = lo // BLOCK_SIZE, (hi - 1) // BLOCK_SIZE
        values = np.concatenate([self._block(b) for b in range(first, last + 1)])
        start = lo - first * BLOCK_SIZE
        return values[start:start + (hi - lo)]

    def cumulative(self, cell: int) -> float:
        """Value of the subordinator at cell boundary `cell`, anchored at 0."""
        if cell >= 0:
            return float(np.sum(self.increments(0, cell)))
        return -float(np.sum(self.increments(cell, 0)))

    def cells_per_site(self, scale: float) -> int:
        """Number of mesh cells inside one rescaled site of width 1/sqrt(T)."""
        if not scale >= 1:
            raise domain_exception("T", scale, "T >= 1")
        ratio = 1.0 / (np.sqrt(scale) * self.mesh)
        cells = int(round(ratio))
        if cells < 1 or abs(ratio - cells) > 1e-9 * ratio:
            raise inadmissible_scale_exception(scale, self.mesh, nearest=self.admissible_near(scale))
        return cells

    def admissible_near(self, scale: float) -> List[float]:
        """The two admissible scales bracketing `scale`."""
        cells = 1.0 / (np.sqrt(scale) * self.mesh)
        candidates = {max(int(np.floor(cells)), 1), max(int(np.ceil(cells)), 1)}
        return sorted(1.0 / (n * self.mesh) ** 2 for n in candidates)

    def site_increments(self, scale: float, lo: int, hi: int) -> np.ndarray:
        """H((k+1)/sqrt(T)) - H(k/sqrt(T)) for sites k = lo .. hi-1."""
        cells = self.cells_per_site(scale)
        values = self.increments(lo * cells, hi * cells)
        return values.reshape(hi - lo, cells).sum(axis=1)


@lru_cache(maxsize=16)
def subordinator_path(alpha: float, mesh: float, seed: int) -> SubordinatorPath:
    """Per-process cache so every scale of one run shares a single path."""
    return SubordinatorPath(alpha, mesh, seed)


def rescaled_H(path: SubordinatorPath, scale: float, x: int) -> float:
    """Rescaled horizontal rate T**(1/(2 alpha)) * (H((x+1)/sqrt T) - H(x/sqrt T))."""
    return float(scale ** (1.0 / (2.0 * path.alpha)) * path.site_increments(scale, x, x + 1)[0])


def rescaled_window(path: SubordinatorPath, scale: float, lo: int, hi: int) -> np.ndarray:
    """Vectorised rescaled_H over x = lo .. hi-1."""
    return scale ** (1.0 / (2.0 * path.alpha)) * path.site_increments(scale, lo, hi)


# --- Line fields ---

class LineField:
    """One axis of the environment, memoised by blocks of coordinates."""

    def __init__(self, spec: EnvironmentSpec, axis: str, scale: float = 1.0):
        if axis not in (HORIZONTAL, VERTICAL):
            raise domain_exception("axis", axis, "horizontal or vertical")
        self.spec = spec
        self.axis = axis
        self.scale = scale
        self.mode = spec.h_mode if axis == HORIZONTAL else spec.v_mode
        if self.mode == STABLE_INCREMENTS and axis == VERTICAL:
            raise configuration_exception("stable_increments requested on the vertical axis.")
        self.memo: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        self.path: Optional[SubordinatorPath] = None
        if self.mode == STABLE_INCREMENTS:
            path_seed = spec.seed
            if spec.h_coupling == "annealed":
                path_seed = derive_seed(spec.seed, int(np.float64(scale).view(np.uint64)))
            self.path = subordinator_path(spec.alpha1, spec.mesh, path_seed)
            # Fails early on an inadmissible scale.
            self.path.cells_per_site(scale)

    def _constant(self) -> float:
        return self.spec.h_floor if self.axis == HORIZONTAL else self.spec.v_mean

    def _generate_block(self, block: int) -> np.ndarray:
        lo = block * BLOCK_SIZE
        if self.mode == CONSTANT:
            return np.full(BLOCK_SIZE, self._constant(), dtype=np.float64)
        if self.mode == STABLE_INCREMENTS:
            return rescaled_window(self.path, self.scale, lo, lo + BLOCK_SIZE)
        if self.axis == HORIZONTAL:
            alpha, floor = self.spec.alpha1, self.spec.h_floor
        else:
            alpha, floor = self.spec.alpha2, self.spec.resolved_v_floor
        gen = block_generator(self.spec.seed, self.axis, block)
        return sample_pareto_floor(alpha, floor, open_uniform(gen, BLOCK_SIZE))

    def _block(self, block: int) -> np.ndarray:
        with self._lock:
            values = self.memo.get(block)
            if values is None:
                values = self._generate_block(block)
                self.memo[block] = values
            return values

    def line_value(self, k: int) -> float:
        block, offset = divmod(int(k), BLOCK_SIZE)
        return float(self._block(block)[offset])

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Values for coordinates lo .. hi-1, identical to line_value()."""
        first, last = lo // BLOCK_SIZE, (hi - 1) // BLOCK_SIZE
        values = np.concatenate([self._block(b) for b in range(first, last + 1)])
        start = lo - first * BLOCK_SIZE
        return values[start:start + (hi - lo)]


def line_value(field: LineField, k: int) -> float:
    """Rate of line k; pure in (seed, axis, k)."""
    return field.line_value(k)


class Environment:
    """Both line fields of one environment at one scale T."""

    def __init__(self, spec: EnvironmentSpec, scale: float = 1.0):
        self.spec = spec
        self.scale = scale
        self.horizontal = LineField(spec, HORIZONTAL, scale)
        self.vertical = LineField(spec, VERTICAL, scale)
        self._windows: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def H(self, k: int) -> float:
        return self.horizontal.line_value(k)

    def V(self, k: int) -> float:
        return self.vertical.line_value(k)

    def window(self, radius: int) -> Tuple[np.ndarray, np.ndarray]:
        """(H, V) arrays over coordinates -radius .. radius."""
        if radius not in self._windows:
            logger.debug(f"Materialising environment window of radius {radius} (T={self.scale})")
            self._windows = {
                radius: (
                    self.horizontal.window(-radius, radius + 1),
                    self.vertical.window(-radius, radius + 1),
                )
            }
        return self._windows[radius]


@lru_cache(maxsize=32)
def build_environment(spec: EnvironmentSpec, scale: float = 1.0) -> Environment:
    """Per-process environment cache; specs are hashable."""
    return Environment(spec, scale)


def dump_window(env: Environment, lo: int, hi: int) -> List[Tuple[int, float, float]]:
    """Rows (k, H(k), V(k)) for k = lo .. hi-1."""
    h = env.horizontal.window(lo, hi)
    v = env.vertical.window(lo, hi)
    return [(k, float(h[i]), float(v[i])) for i, k in enumerate(range(lo, hi))]
