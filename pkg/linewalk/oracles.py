"""
Verification oracles: the coupled differential-inequality bound, the
heavy-tail maximum estimate, local-time and clock moment bounds, and
sanity checks of the stable sampler.

The differential-inequality part is deterministic numerics. The rest are
Monte Carlo checks with fixed streams, so every number they report is a
function of the seed.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats as scipy_stats

from linewalk.core.errors import domain_exception, unstable_integration_exception
from linewalk.core.rng import DEFAULT_SEED, derive_seed, stream_generator
from linewalk.envgen import (
    CONSTANT,
    DEFAULT_MESH,
    HORIZONTAL,
    PARETO_FLOOR,
    EnvironmentSpec,
    LineField,
    draw_positive_stable,
    subordinator_path,
)
from linewalk.limits import ks_from_component
from linewalk.local_times import local_times, simulate_srw
from linewalk.stats import exact_mean, fit_power_law, standard_error

logger = logging.getLogger(__name__)

# --- Configuration ---
DEFAULT_STEP = 1e-4
MATCH_TOLERANCE = 1e-6
DOMINATION_SLACK = 1e-8
FIRST = "first"
SECOND = "second"
SYSTEMS = (FIRST, SECOND)

MAX_BOUND_FROM = 2 ** 10
DCLOCK_FROM = 2 ** 10
DCLOCK_RATIO_LIMIT = 3.0
STREAM_STRIDE = 1 << 32


# ==========================================
# Differential inequalities
# ==========================================

@dataclass(frozen=True)
class DiffIneqCase:
    """Constants of the coupled system; t_grid must start at 0."""
    C: float
    kappa: float
    eps1_plus: float
    eps2_plus: float
    t_grid: Tuple[float, ...] = tuple(np.linspace(0.0, 2.0, 21))

    def __post_init__(self):
        if self.C < 0:
            raise domain_exception("C", self.C, "C >= 0")
        if self.kappa < 0:
            raise domain_exception("kappa", self.kappa, "kappa >= 0")
        if self.eps1_plus < 0 or self.eps2_plus < 0:
            raise domain_exception("eps_plus", (self.eps1_plus, self.eps2_plus), "eps_i+ >= 0")
        if not self.eps1_plus * self.eps2_plus < 1:
            raise domain_exception("eps_plus", (self.eps1_plus, self.eps2_plus), "eps1+ * eps2+ < 1")
        if not self.t_grid or self.t_grid[0] != 0 or any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise domain_exception("t_grid", list(self.t_grid), "an increasing grid starting at 0")

    @property
    def A1(self) -> float:
        return (1 + self.eps1_plus) / (1 - self.eps1_plus * self.eps2_plus)

    @property
    def A2(self) -> float:
        return (1 + self.eps2_plus) / (1 - self.eps1_plus * self.eps2_plus)

    @property
    def B2(self) -> float:
        if self.eps2_plus == 0:
            raise domain_exception("eps2_plus", 0, "eps2+ > 0 for the second system")
        return self.A2 / self.eps2_plus

    @property
    def exact_solution_expected(self) -> bool:
        """The closed form solves the first system exactly iff C*kappa = 1 or A1 = A2."""
        return math.isclose(self.C * self.kappa, 1.0) or math.isclose(self.A1, self.A2)


def algebraic_identities(eps1_plus, eps2_plus):
    """Residuals of A1 - 1 = eps1+ A2 and A2 - 1 = eps2+ A1.

    Plain arithmetic, so exact rationals give exactly zero.
    """
    a1 = (1 + eps1_plus) / (1 - eps1_plus * eps2_plus)
    a2 = (1 + eps2_plus) / (1 - eps1_plus * eps2_plus)
    return a1 - 1 - eps1_plus * a2, a2 - 1 - eps2_plus * a1


def _check_system(case: DiffIneqCase, system: str) -> None:
    if system not in SYSTEMS:
        raise domain_exception("system", system, f"one of {SYSTEMS}")
    if system == SECOND and case.eps2_plus == 0:
        raise domain_exception("eps2_plus", 0, "eps2+ > 0 for the second system")


def diffineq_closed_form(case: DiffIneqCase, t, system: str = FIRST, C: Optional[float] = None):
    """([(C k)^(1/A1) + C t]^A1, [(C k)^(1/A2) + C t]^A2); the second system uses B2 for y.

    `C` overrides the case constant, e.g. with some C+ > C for the comparison bound.
    """
    _check_system(case, system)
    c = case.C if C is None else C
    t = np.asarray(t, dtype=np.float64)
    ck = c * case.kappa
    a1 = case.A1
    a2 = case.B2 if system == SECOND else case.A2
    x = (ck ** (1.0 / a1) + c * t) ** a1
    y = (ck ** (1.0 / a2) + c * t) ** a2
    return x, y


def _derivative(case: DiffIneqCase, system: str, x: float, y: float) -> Tuple[float, float]:
    c, e1, e2 = case.C, case.eps1_plus, case.eps2_plus
    if system == FIRST:
        return c * case.A1 * y ** e1, c * case.A2 * x ** e2
    return c * case.A1 * y ** (e1 * e2), c * case.B2 * x ** e2 * y ** (1.0 - e2)


def diffineq_integrate(case: DiffIneqCase, system: str = FIRST, step: float = DEFAULT_STEP):
    """Classical RK4 for the equality system, reported on case.t_grid.

    Each grid interval is split into equal substeps no longer than `step`.
    Raises if the solution stops being finite and non-decreasing.
    """
    _check_system(case, system)
    if not step > 0:
        raise domain_exception("step", step, "step > 0")
    grid = np.asarray(case.t_grid, dtype=np.float64)
    xs = np.empty_like(grid)
    ys = np.empty_like(grid)
    if case.C == 0:
        xs.fill(0.0)
        ys.fill(0.0)
        return xs, ys

    x = y = case.C * case.kappa
    xs[0], ys[0] = x, y
    for i in range(1, grid.size):
        span = grid[i] - grid[i - 1]
        n = max(1, int(math.ceil(span / step - 1e-9)))
        h = span / n
        for _ in range(n):
            k1x, k1y = _derivative(case, system, x, y)
            k2x, k2y = _derivative(case, system, x + 0.5 * h * k1x, y + 0.5 * h * k1y)
            k3x, k3y = _derivative(case, system, x + 0.5 * h * k2x, y + 0.5 * h * k2y)
            k4x, k4y = _derivative(case, system, x + h * k3x, y + h * k3y)
            x_new = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            y_new = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
            if not (math.isfinite(x_new) and math.isfinite(y_new)) or x_new < x or y_new < y:
                raise unstable_integration_exception(h, f"non-monotone or non-finite state near t={grid[i]!r}")
            x, y = x_new, y_new
        xs[i], ys[i] = x, y
    return xs, ys


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.maximum(np.abs(b), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def richardson_check(case: DiffIneqCase, system: str = FIRST, step: float = DEFAULT_STEP) -> float:
    """Largest relative change of the numeric solution when the step is halved."""
    x1, y1 = diffineq_integrate(case, system, step)
    x2, y2 = diffineq_integrate(case, system, step / 2.0)
    if case.C == 0:
        return 0.0
    return max(_relative_gap(x1, x2), _relative_gap(y1, y2))


def closed_form_match(case: DiffIneqCase, system: str = FIRST, step: float = DEFAULT_STEP) -> Dict[str, Any]:
    """Largest relative error between closed form and RK4 over the grid."""
    nx, ny = diffineq_integrate(case, system, step)
    cx, cy = diffineq_closed_form(case, case.t_grid, system)
    error = 0.0 if case.C == 0 else max(_relative_gap(nx, cx), _relative_gap(ny, cy))
    return {
        "system": system,
        "max_relative_error": error,
        "exact_solution_expected": case.exact_solution_expected,
        "passed": bool(error <= MATCH_TOLERANCE),
    }


def domination_check(case: DiffIneqCase, system: str = FIRST, c_plus: Optional[float] = None,
                     slack: float = DOMINATION_SLACK, step: float = DEFAULT_STEP) -> Dict[str, Any]:
    """Closed form at C+ (default C) against the RK4 solution at C.

    A grid point is a violation when the numeric value exceeds the closed
    form by more than slack * (1 + |closed form|).
    """
    if c_plus is not None and c_plus < case.C:
        raise domain_exception("c_plus", c_plus, f"c_plus >= C={case.C}")
    nx, ny = diffineq_integrate(case, system, step)
    cx, cy = diffineq_closed_form(case, case.t_grid, system, C=c_plus)
    margin_x = cx - nx + slack * (1.0 + np.abs(cx))
    margin_y = cy - ny + slack * (1.0 + np.abs(cy))
    grid = np.asarray(case.t_grid)
    bad = (margin_x < 0) | (margin_y < 0)
    if bad.any():
        logger.warning(f"Closed form fails to dominate at {int(bad.sum())} grid points (C*kappa={case.C * case.kappa!r})")
    return {
        "system": system,
        "c_plus": case.C if c_plus is None else c_plus,
        "min_margin_x": float(margin_x.min()),
        "min_margin_y": float(margin_y.min()),
        "violations": grid[bad].tolist(),
        "passed": not bool(bad.any()),
    }


# ==========================================
# Heavy-tail maxima
# ==========================================

def max_bound_check(alpha: float, alpha_minus: float, k_grid: Sequence[int], seeds: int,
                    mode: str = PARETO_FLOOR, floor: float = 1.0, multiplier: float = 1.0,
                    base_seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """Growth of M_k = max_{|i|<=k} Z_i for i.i.d. line values Z.

    The fitted slope of log median M_k against log k should be near 1/alpha.
    Per seed, C is fitted at the smallest k and the bound M_k <= C (1 + k^(1/alpha_minus))
    is checked for every k >= 2**10.
    """
    if not 0 < alpha_minus < alpha:
        raise domain_exception("alpha_minus", alpha_minus, f"0 < alpha_minus < alpha={alpha}")
    if mode not in (PARETO_FLOOR, CONSTANT):
        raise domain_exception("mode", mode, "pareto_floor or constant")
    k_grid = np.asarray(sorted(int(k) for k in k_grid), dtype=np.int64)
    if k_grid.size < 2 or k_grid[0] < 1:
        raise domain_exception("k_grid", k_grid.tolist(), "at least two values >= 1")
    k_max = int(k_grid[-1])

    maxima = np.empty((seeds, k_grid.size), dtype=np.float64)
    violations = []
    for s in range(seeds):
        spec = EnvironmentSpec(alpha1=alpha, h_mode=mode, h_floor=floor, seed=derive_seed(base_seed, s))
        values = multiplier * LineField(spec, HORIZONTAL).window(-k_max, k_max + 1)
        centre = k_max
        # outward running maximum: r[k] = max(|i| <= k)
        outward = np.maximum(values[centre:], values[centre::-1])
        running = np.maximum.accumulate(outward)
        maxima[s] = running[k_grid]
        c_fit = maxima[s, 0] / (1.0 + k_grid[0] ** (1.0 / alpha_minus))
        bound = c_fit * (1.0 + k_grid.astype(np.float64) ** (1.0 / alpha_minus))
        checked = k_grid >= MAX_BOUND_FROM
        violations.append(int(np.sum(maxima[s][checked] > bound[checked])))

    medians = np.median(maxima, axis=0)
    fit = fit_power_law(k_grid, medians)
    return {
        "alpha": alpha,
        "alpha_minus": alpha_minus,
        "k_grid": k_grid.tolist(),
        "median_maxima": medians.tolist(),
        "slope": fit.slope,
        "target_slope": 0.0 if mode == CONSTANT else 1.0 / alpha,
        "violations": violations,
        "total_violations": int(sum(violations)),
    }


# ==========================================
# Local-time and clock moments
# ==========================================

def lt_moment_check(scale: float, t_grid: Sequence[float], runs: int,
                    base_seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """log-log slopes in t of E[l^T_t(0)^4] and E[l^T_t(0)^2] for the SRW."""
    t_grid = np.asarray(sorted(t_grid), dtype=np.float64)
    samples = np.empty((runs, t_grid.size), dtype=np.float64)
    for r in range(runs):
        path = simulate_srw(scale * t_grid[-1], stream_generator(base_seed, "srw", r))
        field = local_times(path, scale, t_grid)
        samples[r] = [field.at_site(i, 0) for i in range(t_grid.size)]

    out: Dict[str, Any] = {"T": scale, "t_grid": t_grid.tolist(), "runs": runs}
    for p in (4, 2):
        moments = [exact_mean(samples[:, i] ** p) for i in range(t_grid.size)]
        out[f"moments_p{p}"] = moments
        out[f"slope_p{p}"] = fit_power_law(t_grid, moments).slope
        out[f"monotone_p{p}"] = bool(np.all(np.diff(moments) >= 0))
    return out


def dclock_second_moment(alpha: float, t_grid: Sequence[float], runs: int, seed: int = DEFAULT_SEED,
                         mesh: float = DEFAULT_MESH, times: Sequence[float] = (0.25, 0.5, 1.0, 2.0)) -> Dict[str, Any]:
    """Quenched E[D^T(t)^2] on one subordinator path shared by every T.

    With V = 1 the Y walk's vertical coordinate is an SRW, so D^T(t) is the
    local-time integral of the rescaled subordinator increments.
    """
    path = subordinator_path(alpha, mesh, seed)
    times = np.asarray(times, dtype=np.float64)
    grid = np.concatenate(([0.0], times))
    i_one = int(np.argmin(np.abs(times - 1.0))) + 1
    delta = 0.5 * (1.0 + 1.0 / alpha)

    table = []
    for i, scale in enumerate(t_grid):
        path.cells_per_site(scale)
        values = np.empty((runs, times.size), dtype=np.float64)
        for r in range(runs):
            walk = simulate_srw(scale * times[-1], stream_generator(seed, "srw", i * STREAM_STRIDE + r))
            values[r] = ks_from_component(walk, path, scale, grid)[1:]
        moments = [exact_mean(values[:, j] ** 2) for j in range(times.size)]
        table.append({"T": float(scale), "moments": moments, "second_moment_t1": moments[i_one - 1]})
        logger.info(f"D^T clock at T={scale!r}: E[D(1)^2]={moments[i_one - 1]!r}")

    settled = [row["second_moment_t1"] for row in table if row["T"] >= DCLOCK_FROM]
    ratio = max(settled) / min(settled) if settled else None
    slope = fit_power_law(times, table[-1]["moments"]).slope
    return {
        "alpha": alpha,
        "table": table,
        "max_min_ratio": ratio,
        "bounded": ratio is not None and ratio <= DCLOCK_RATIO_LIMIT,
        "t_slope": slope,
        "target_t_slope": 2.0 * delta,
    }


# ==========================================
# Stable sampler
# ==========================================

def levy_cdf(x):
    """CDF of the positive 1/2-stable law with Laplace transform exp(-sqrt(lam))."""
    x = np.asarray(x, dtype=np.float64)
    return special.erfc(1.0 / (2.0 * np.sqrt(x)))


def stable_law_check(alphas: Sequence[float] = (0.4, 0.5, 0.8), lambdas: Sequence[float] = (0.5, 1.0, 2.0),
                     draws: int = 100_000, ks_draws: int = 10_000, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """Empirical Laplace transforms against exp(-lam^alpha), plus the alpha=1/2 CDF."""
    laplace = []
    for i, alpha in enumerate(alphas):
        sample = draw_positive_stable(alpha, stream_generator(seed, "sampler", i), draws)
        for lam in lambdas:
            values = np.exp(-lam * sample)
            estimate, se = exact_mean(values), standard_error(values)
            target = math.exp(-lam ** alpha)
            laplace.append({
                "alpha": alpha, "lambda": lam, "estimate": estimate, "target": target, "se": se,
                "passed": bool(abs(estimate - target) <= 3.0 * se),
            })
    sample = draw_positive_stable(0.5, stream_generator(seed, "sampler", len(alphas)), ks_draws)
    ks = float(scipy_stats.kstest(sample, levy_cdf).statistic)
    return {"laplace": laplace, "levy_ks": ks, "levy_passed": bool(ks <= 0.02)}
