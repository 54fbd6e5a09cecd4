"""
Exponent fits of |X_i(T)| against T for one walk kind.
"""

import logging
import math
from typing import Any, Dict, List, Optional, Tuple

from linewalk.core.config import RunConfig
from linewalk.core.export import rows_csv
from linewalk.core.rendering import render_paths_svg
from linewalk.envgen import STABLE_INCREMENTS
from linewalk.experiments import exponent_fits
from linewalk.stats import ScalingParams, scaling_params
from linewalk.studies.base import Check, study

logger = logging.getLogger(__name__)

# Accepted distance between fitted and proved exponents
TOLERANCE = {"diffusive": (0.05, 0.05), "case2": (0.08, 0.05), "csrw": (0.05, 0.06)}


def exponent_targets(config: RunConfig, params: ScalingParams) -> Tuple[Optional[Tuple[float, float]], str, bool]:
    """(targets, tolerance key, hard) for the configured walk, or (None, '', False)."""
    tag = config.walk_kind
    if params.supercritical or tag == "XSTAR":
        return None, "", False
    if tag in ("VSRW", "Y"):
        if params.case == "diffusive":
            return (params.gamma1, params.gamma2), "diffusive", True
        # the proved case needs H stable with alpha1 < 1 and V integrable
        hard = params.case == "case2" and config.h_mode == STABLE_INCREMENTS and params.eps1 > 0
        return (params.gamma1, params.gamma2), "case2", hard
    if tag == "CSRW":
        if config.h_mode == STABLE_INCREMENTS and config.alpha1 < 1 and params.eps2 == 0:
            return (0.5, 1.0 / (2.0 * params.delta)), "csrw", True
        return (0.5, params.csrw_gamma2), "csrw", False
    return None, "", False


@study(name="scaling", description="Fits the growth exponents of both coordinates over a grid of scales.")
def scaling(config: RunConfig) -> Dict[str, Any]:
    spec = config.environment_spec()
    kind = config.walk()
    params = scaling_params(config.alpha1, config.alpha2, config.alpha1_minus, config.alpha2_minus)
    run = exponent_fits(spec, kind, config.t_grid, config.runs, config.workers, config.jump_cap)

    targets, key, hard = exponent_targets(config, params)
    checks: List[Check] = []
    for i, name in enumerate(("x1", "x2")):
        fit = run.fits[name]
        if targets is None or targets[i] is None:
            continue
        tolerance = TOLERANCE[key][i]
        checks.append(Check(
            f"exponent_{name}", abs(fit.slope - targets[i]) <= tolerance,
            hard=hard and fit.reportable, value=fit.slope, threshold=[targets[i], tolerance],
        ))

    log_t = [math.log2(h) for h in run.fits["x1"].scales]
    series = {f"log2 median |{name}|": [math.log2(s) for s in run.fits[name].statistics] for name in ("x1", "x2")}
    report = {
        "environment": spec.to_dict(),
        "params": params.to_dict(),
        "scaling": run.to_dict(),
        "targets": list(targets) if targets else None,
    }
    artifacts = {
        "scaling.csv": rows_csv(run.rows),
        "scaling.svg": render_paths_svg(log_t, series, title=f"{kind.tag} medians against log2 T"),
    }
    return {"report": report, "artifacts": artifacts, "checks": checks}
