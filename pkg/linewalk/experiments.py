"""
Monte Carlo studies built on the walk simulator.

Every study is a deterministic function of its arguments: each run gets a
fixed stream id (or a derived environment seed), runs are fanned out with
`run_ensemble`, and all reductions use medians or `math.fsum`, so results do
not depend on the worker count.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from linewalk.core.ensemble import run_ensemble
from linewalk.core.errors import (
    configuration_exception,
    domain_exception,
    empty_sample_exception,
    fit_refused_exception,
    horizon_exception,
)
from linewalk.core.rng import derive_seed
from linewalk.envgen import (
    CONSTANT,
    PARETO_FLOOR,
    STABLE_INCREMENTS,
    EnvironmentSpec,
    build_environment,
    pareto_moment,
)
from linewalk.stats import (
    ExponentFit,
    exact_mean,
    fit_power_law,
    interquartile_range,
    scaling_params,
    standard_error,
)
from linewalk.walker import CSRW, DEFAULT_JUMP_CAP, VSRW, Y_WALK, WalkKind, WalkSummary, simulate_summary

logger = logging.getLogger(__name__)

# --- Configuration ---
EXCLUSION_LIMIT = 0.10
STREAM_STRIDE = 1 << 32
SE_MULTIPLIER = 3.0
MOMENT_SLOPE_TOLERANCE = 0.15

Power = Tuple[float, float]


@dataclass(frozen=True)
class RunTask:
    """One walk run; picklable so it can cross process boundaries."""
    spec: EnvironmentSpec
    kind: WalkKind
    scale: float
    horizon: float
    powers: Tuple[Power, ...] = ()
    stream: int = 0
    jump_cap: int = DEFAULT_JUMP_CAP


def environment_scale(spec: EnvironmentSpec, scale: float) -> float:
    """Only the stable mode rescales the environment itself."""
    return scale if spec.h_mode == STABLE_INCREMENTS else 1.0


def walk_horizon(spec: EnvironmentSpec, kind: WalkKind, scale: float) -> float:
    """Physical horizon of a run at scale T.

    In stable mode the CSRW needs T**delta to see the same stretch of
    environment the VSRW sees in time T.
    """
    if spec.h_mode == STABLE_INCREMENTS and kind.tag == CSRW.tag:
        return scale ** scaling_params(spec.alpha1, spec.alpha2).delta
    return scale


def run_summary(task: RunTask) -> WalkSummary:
    env = build_environment(task.spec, environment_scale(task.spec, task.scale))
    return simulate_summary(env, task.kind, task.horizon, powers=task.powers,
                            stream=task.stream, jump_cap=task.jump_cap)


def _stream(t_index: int, run: int) -> int:
    return t_index * STREAM_STRIDE + run


def _split_truncated(summaries: Sequence[WalkSummary]) -> Tuple[List[WalkSummary], float]:
    kept = [s for s in summaries if not s.truncated]
    rate = 1.0 - len(kept) / len(summaries) if summaries else 0.0
    return kept, rate


# --- Exponent fits ---

@dataclass
class ScalingRun:
    """Per-component exponent fits plus the raw per-run rows behind them."""
    kind: str
    fits: Dict[str, ExponentFit]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    exclusion_rates: Dict[float, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "fits": {name: fit.to_dict() for name, fit in self.fits.items()},
            "exclusion_rates": {repr(k): v for k, v in self.exclusion_rates.items()},
        }


def exponent_fits(spec: EnvironmentSpec, kind: WalkKind, t_grid: Sequence[float], runs: int,
                  workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> ScalingRun:
    """Fits log median |X_i(horizon)| against log horizon for both components.

    Truncated runs are excluded; if more than 10% of the runs at any scale
    are truncated the fit is refused.
    """
    t_grid = [float(t) for t in t_grid]
    if len(t_grid) < 2:
        raise domain_exception("t_grid", t_grid, "at least two scales")
    if runs < 1:
        raise domain_exception("runs", runs, "runs >= 1")

    horizons = [walk_horizon(spec, kind, t) for t in t_grid]
    tasks = [
        RunTask(spec, kind, t, h, stream=_stream(i, r), jump_cap=jump_cap)
        for i, (t, h) in enumerate(zip(t_grid, horizons))
        for r in range(runs)
    ]
    summaries = run_ensemble(run_summary, tasks, workers, label=f"{kind.tag} scaling")

    rows: List[Dict[str, Any]] = []
    medians = {"x1": [], "x2": []}
    exclusion: Dict[float, float] = {}
    for i, (t, h) in enumerate(zip(t_grid, horizons)):
        chunk = summaries[i * runs:(i + 1) * runs]
        kept, rate = _split_truncated(chunk)
        exclusion[t] = rate
        if rate > EXCLUSION_LIMIT:
            raise fit_refused_exception(rate, EXCLUSION_LIMIT)
        if rate > 0:
            logger.warning(f"Excluded {rate:.1%} truncated runs at T={t!r}")
        for r, s in enumerate(chunk):
            rows.append({"T": t, "horizon": h, "run": r, "x1": s.final_position[0],
                         "x2": s.final_position[1], "jumps": s.jumps, "truncated": s.truncated})
        medians["x1"].append(float(np.median([abs(s.final_position[0]) for s in kept])))
        medians["x2"].append(float(np.median([abs(s.final_position[1]) for s in kept])))
        logger.info(f"{kind.tag} T={t!r}: median |X1|={medians['x1'][-1]!r}, median |X2|={medians['x2'][-1]!r}")

    worst = max(exclusion.values())
    fits = {name: fit_power_law(horizons, values, exclusion_rate=worst) for name, values in medians.items()}
    if len(t_grid) < 4:
        logger.warning(f"Only {len(t_grid)} scales: exponent fits are not reportable")
    return ScalingRun(kind.tag, fits, rows, exclusion)


def exponent_fit(spec: EnvironmentSpec, kind: WalkKind, component: int, t_grid: Sequence[float],
                 runs: int, workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> ExponentFit:
    """Exponent fit of a single component (1 or 2)."""
    if component not in (1, 2):
        raise domain_exception("component", component, "1 or 2")
    return exponent_fits(spec, kind, t_grid, runs, workers, jump_cap).fits[f"x{component}"]


# --- Ratio of clocks ---

def ratio_statistic(spec: EnvironmentSpec, scale: float, runs: int, workers: Optional[int] = 1,
                    jump_cap: int = DEFAULT_JUMP_CAP, stream_offset: int = 0) -> np.ndarray:
    """Per-run D^{V,T}(1) / D^T(1) along one Y trajectory each.

    Both clocks share the factor T**-delta, so the ratio is the quotient of
    the integrals of H/V and of H along the path.
    """
    if spec.v_mean != 1.0:
        raise domain_exception("v_mean", spec.v_mean, "v_mean = 1 for the ratio statistic")
    powers = ((1.0, -1.0), (1.0, 0.0))
    tasks = [RunTask(spec, Y_WALK, scale, scale, powers, stream_offset + r, jump_cap) for r in range(runs)]
    summaries = run_ensemble(run_summary, tasks, workers, label="ratio")
    kept, rate = _split_truncated(summaries)
    if rate > 0:
        logger.warning(f"Ratio statistic at T={scale!r}: {rate:.1%} truncated runs excluded")
    if not kept:
        raise empty_sample_exception("ratio")
    return np.array([s.integrals[powers[0]] / s.integrals[powers[1]] for s in kept])


def ratio_study(spec: EnvironmentSpec, t_grid: Sequence[float], runs: int,
                workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Mean and interquartile range of the clock ratio at each scale."""
    table = []
    for i, t in enumerate(t_grid):
        ratios = ratio_statistic(spec, t, runs, workers, jump_cap, stream_offset=_stream(i, 0))
        table.append({"T": float(t), "mean": exact_mean(ratios), "se": standard_error(ratios),
                      "iqr": interquartile_range(ratios), "runs": int(ratios.size)})
        logger.info(f"Ratio T={t!r}: mean={table[-1]['mean']!r} iqr={table[-1]['iqr']!r}")
    return {"table": table}


# --- Ergodic averages ---

def ergodic_average(spec: EnvironmentSpec, kind: WalkKind, horizon: float, power: Power = (0.0, 0.0),
                    stream: int = 0, scale: float = 1.0, jump_cap: int = DEFAULT_JUMP_CAP) -> float:
    """(1/T) * int_0^T H(x2)**p V(x1)**q ds along a single run."""
    task = RunTask(spec, kind, scale, horizon, (tuple(map(float, power)),), stream, jump_cap)
    summary = run_summary(task)
    if summary.truncated:
        raise horizon_exception(horizon, summary.elapsed)
    return summary.integrals[task.powers[0]] / horizon


def _ergodic_task(args) -> float:
    spec, kind, horizon, power, jump_cap = args
    return ergodic_average(spec, kind, horizon, power, jump_cap=jump_cap)


def line_moment(spec: EnvironmentSpec, axis: str, beta: float) -> float:
    """E[H(0)**beta] or E[V(0)**beta] under the environment law."""
    if axis == "horizontal":
        mode, alpha, floor, constant = spec.h_mode, spec.alpha1, spec.h_floor, spec.h_floor
    else:
        mode, alpha, floor, constant = spec.v_mode, spec.alpha2, spec.resolved_v_floor, spec.v_mean
    if mode == CONSTANT:
        return constant ** beta
    if mode == PARETO_FLOOR:
        return pareto_moment(alpha, floor, beta)
    raise configuration_exception(f"No closed-form line moment in {mode} mode.")


def ergodic_product_check(spec: EnvironmentSpec, alpha_minus: Power, horizon: float, environments: int,
                          tolerance: float = 0.10, workers: Optional[int] = 1,
                          jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Time averages of H**a1m * V**a2m along the VSRW over independent environments,
    compared with the product mean E[H**a1m] * E[V**a2m]."""
    a1m, a2m = alpha_minus
    target = line_moment(spec, "horizontal", a1m) * line_moment(spec, "vertical", a2m)
    items = [
        (replace(spec, seed=derive_seed(spec.seed, e)), VSRW, horizon, (a1m, a2m), jump_cap)
        for e in range(environments)
    ]
    averages = np.array(run_ensemble(_ergodic_task, items, workers, label="ergodic"))
    within = np.abs(averages / target - 1.0) <= tolerance
    return {
        "target": target,
        "averages": averages.tolist(),
        "fraction_within": float(np.mean(within)),
        "tolerance": tolerance,
    }


# --- Over-scaling ---

def overscaling_study(spec: EnvironmentSpec, a: Power, t_grid: Sequence[float], runs: int,
                      kind: WalkKind = VSRW, workers: Optional[int] = 1,
                      jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Per-T median of sup_{s<=1} T**(-a_i/2) |X_i(T s)|.

    The statistic tends to 0 when a_i > (1+eps_i)/(1-eps1*eps2); below that
    threshold a warning is logged and the study still runs.
    """
    params = scaling_params(spec.alpha1, spec.alpha2)
    thresholds = [None, None] if params.supercritical else [2 * params.gamma1, 2 * params.gamma2]
    for i, (ai, threshold) in enumerate(zip(a, thresholds), start=1):
        if threshold is None:
            logger.warning(f"eps1*eps2={params.eps_product!r} >= 1: no over-scaling threshold for a{i}")
        elif ai <= threshold:
            logger.warning(f"a{i}={ai!r} does not exceed the threshold {threshold!r}; the statistic need not decay")

    tasks = [RunTask(spec, kind, t, t, stream=_stream(i, r), jump_cap=jump_cap)
             for i, t in enumerate(t_grid) for r in range(runs)]
    summaries = run_ensemble(run_summary, tasks, workers, label="overscaling")

    table = []
    for i, t in enumerate(t_grid):
        kept, rate = _split_truncated(summaries[i * runs:(i + 1) * runs])
        row = {"T": float(t), "truncation_rate": rate}
        for c in (0, 1):
            values = [t ** (-a[c] / 2.0) * s.max_abs[c] for s in kept]
            row[f"median_x{c + 1}"] = float(np.median(values)) if values else float("nan")
        table.append(row)

    slopes = {}
    for c in ("x1", "x2"):
        medians = [row[f"median_{c}"] for row in table]
        if len(medians) >= 2 and all(m > 0 for m in medians):
            slopes[c] = fit_power_law(list(t_grid), medians).slope
    return {
        "a": list(a),
        "thresholds": thresholds,
        "table": table,
        "slopes": slopes,
        "decay_ratio": {
            c: table[-1][f"median_{c}"] / table[0][f"median_{c}"] if table[0][f"median_{c}"] > 0 else None
            for c in ("x1", "x2")
        },
    }


# --- Conjecture explorer ---

def conjecture_explorer(spec: EnvironmentSpec, t_grid: Sequence[float], runs: int,
                        workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Fitted VSRW and CSRW exponents next to the conjectured ones. Report only."""
    params = scaling_params(spec.alpha1, spec.alpha2)
    gamma1, gamma2 = params.gammas()
    report: Dict[str, Any] = {"case": params.case, "params": params.to_dict()}
    if params.case != "case1":
        logger.info(f"({spec.alpha1}, {spec.alpha2}) is {params.case}; targets are the proved exponents")

    vsrw = exponent_fits(spec, VSRW, t_grid, runs, workers, jump_cap)
    csrw = exponent_fits(spec, CSRW, t_grid, runs, workers, jump_cap)
    report["VSRW"] = {
        "targets": {"x1": gamma1, "x2": gamma2},
        "fits": {name: fit.to_dict() for name, fit in vsrw.fits.items()},
    }
    report["CSRW"] = {
        "targets": {"x1": 0.5, "x2": params.csrw_gamma2},
        "fits": {name: fit.to_dict() for name, fit in csrw.fits.items()},
    }
    return report


# --- Martingale checks ---

def quadratic_variation_check(spec: EnvironmentSpec, horizon: float, runs: int, scale: float = 1.0,
                              workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Means of X_i(t) and of X_1(t)**2 - 2 A_1^H(t), X_2(t)**2 - 2 A_2^V(t) for the VSRW.

    All four are martingales started at 0; each mean is checked against three
    standard errors.
    """
    powers = ((1.0, 0.0), (0.0, 1.0))
    tasks = [RunTask(spec, VSRW, scale, horizon, powers, r, jump_cap) for r in range(runs)]
    kept, rate = _split_truncated(run_ensemble(run_summary, tasks, workers, label="quadratic variation"))
    if not kept:
        raise empty_sample_exception("quadratic variation runs")
    x1 = np.array([s.final_position[0] for s in kept], dtype=np.float64)
    x2 = np.array([s.final_position[1] for s in kept], dtype=np.float64)
    a1 = np.array([s.integrals[powers[0]] for s in kept])
    a2 = np.array([s.integrals[powers[1]] for s in kept])

    out: Dict[str, Any] = {"runs": len(kept), "truncation_rate": rate}
    for name, values in (("x1", x1), ("x2", x2), ("qv1", x1 ** 2 - 2.0 * a1), ("qv2", x2 ** 2 - 2.0 * a2)):
        mean, se = exact_mean(values), standard_error(values)
        out[name] = {"mean": mean, "se": se, "passed": bool(abs(mean) <= SE_MULTIPLIER * se)}
    return out


def xstar_moment_check(spec: EnvironmentSpec, alpha_minus: Power, t_grid: Sequence[float], runs: int,
                       workers: Optional[int] = 1, jump_cap: int = DEFAULT_JUMP_CAP) -> Dict[str, Any]:
    """Log-log slope in T of E[X*_i(T)**2] against the moment-growth exponent A_i."""
    kind = WalkKind("XSTAR", *alpha_minus)
    params = scaling_params(spec.alpha1, spec.alpha2, *alpha_minus)
    if params.A1 is None:
        raise domain_exception("alpha_minus", list(alpha_minus), "eps1+ * eps2+ < 1")
    tasks = [RunTask(spec, kind, t, t, stream=_stream(i, r), jump_cap=jump_cap)
             for i, t in enumerate(t_grid) for r in range(runs)]
    summaries = run_ensemble(run_summary, tasks, workers, label="xstar moments")

    moments = {"x1": [], "x2": []}
    for i, _ in enumerate(t_grid):
        kept, _rate = _split_truncated(summaries[i * runs:(i + 1) * runs])
        for c in (0, 1):
            moments[f"x{c + 1}"].append(exact_mean([float(s.final_position[c]) ** 2 for s in kept]))

    out: Dict[str, Any] = {"t_grid": list(map(float, t_grid)), "moments": moments, "A": [params.A1, params.A2]}
    for c, bound in (("x1", params.A1), ("x2", params.A2)):
        slope = fit_power_law(list(t_grid), moments[c]).slope
        out[f"slope_{c}"] = slope
        out[f"passed_{c}"] = bool(slope <= bound + MOMENT_SLOPE_TOLERANCE)
    return out
