"""
Explosion probes over a grid of tail exponents.
"""

import logging
from itertools import product
from typing import Any, Dict, Tuple

from linewalk.core.config import RunConfig
from linewalk.core.ensemble import run_ensemble
from linewalk.core.export import rows_csv
from linewalk.core.rng import derive_seed
from linewalk.envgen import EnvironmentSpec, build_environment
from linewalk.stats import scaling_params
from linewalk.studies.base import Check, study
from linewalk.walker import WalkKind, explosion_probe

logger = logging.getLogger(__name__)


def _probe(args: Tuple[EnvironmentSpec, WalkKind, float, int]) -> str:
    spec, kind, t, jump_cap = args
    return explosion_probe(build_environment(spec), kind, t, jump_cap)


@study(name="nonexplosion", description="Counts walks that hit the jump cap before a fixed time, per (alpha1, alpha2).")
def nonexplosion(config: RunConfig) -> Dict[str, Any]:
    """Every probe uses its own environment; cells with eps1*eps2 < 1 must never truncate."""
    kind = config.walk()
    rows = []
    checks = []
    for cell, (a1, a2) in enumerate(product(config.alpha_grid, repeat=2)):
        params = scaling_params(a1, a2)
        items = [
            (config.environment_spec(alpha1=a1, alpha2=a2, seed=derive_seed(config.seed, cell, p)),
             kind, config.probe_time, config.jump_cap)
            for p in range(config.probes)
        ]
        outcomes = run_ensemble(_probe, items, config.workers, label=f"probes alpha=({a1}, {a2})")
        truncated = sum(1 for o in outcomes if o == "truncated")
        rate = truncated / config.probes
        rows.append({
            "alpha1": a1, "alpha2": a2, "eps_product": params.eps_product, "regime": params.regime,
            "probes": config.probes, "truncated": truncated, "truncation_rate": rate,
        })
        logger.info(f"alpha=({a1}, {a2}) eps1*eps2={params.eps_product:.3f}: {truncated}/{config.probes} truncated")
        checks.append(Check(
            f"nonexplosion_{a1:g}_{a2:g}", truncated == 0, hard=not params.supercritical,
            value=rate, threshold=0.0,
        ))

    report = {"walk": kind.tag, "probe_time": config.probe_time, "jump_cap": config.jump_cap, "cells": rows}
    return {"report": report, "artifacts": {"nonexplosion.csv": rows_csv(rows)}, "checks": checks}
