"""
Compares rescaled walks in a stable environment with samples of the limit
pairs drawn on the same subordinator path.
"""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from linewalk.core.config import RunConfig
from linewalk.core.ensemble import run_ensemble
from linewalk.core.errors import empty_sample_exception
from linewalk.core.export import path_csv, rows_csv
from linewalk.core.rendering import render_paths_svg
from linewalk.envgen import build_environment, subordinator_path
from linewalk.experiments import RunTask, run_summary, walk_horizon
from linewalk.limits import BM_ROUTE, SRW_ROUTE, fin_pair, ks_sample, limit_pair
from linewalk.stats import ks_two_sample, scaling_params
from linewalk.studies.base import Check, study
from linewalk.walker import CSRW, VSRW

logger = logging.getLogger(__name__)

KS_LIMIT = 0.10
SELF_SIMILARITY_LIMIT = 0.08
ROUTE_LIMIT = 0.08
PATH_POINTS = 64
CLOCK_POWER = (1.0, 0.0)


def _limit_task(args: Tuple) -> Dict[str, float]:
    """One conv and one fin sample on the environment's own subordinator path."""
    alpha, mesh, path_seed, t_proxy, stream, seed = args
    path = subordinator_path(alpha, mesh, path_seed)
    grid = np.linspace(0.0, 1.0, PATH_POINTS + 1)
    conv = limit_pair(alpha, grid, stream, seed, t_proxy, mesh, subordinator=path)
    fin = fin_pair(alpha, [0.0, 1.0], stream, seed, t_proxy, mesh, subordinator=path)
    return {
        "delta": float(conv.clock[-1]),
        "delta_increasing": bool(np.all(np.diff(conv.clock) > 0)),
        "conv_x1": float(conv.first[-1]),
        "conv_x2": float(conv.second[-1]),
        "fin_x1": float(fin.first[-1]),
        "fin_x2": float(fin.second[-1]),
    }


def _ks_task(args: Tuple) -> List[float]:
    alpha, grid, stream, seed, t_proxy, route, mesh, bin_width = args
    return ks_sample(alpha, grid, stream, seed, t_proxy, route, mesh, bin_width).values.tolist()


def _ks_check(name: str, a, b, limit: float, hard: bool) -> Check:
    result = ks_two_sample(a, b)
    logger.info(f"{name}: KS={result.statistic!r} (n={result.n}, m={result.m})")
    return Check(name, result.statistic <= limit, hard=hard, value=result.statistic, threshold=limit)


@study(name="limit-compare", description="Kolmogorov-Smirnov comparison of rescaled walks with the limit pairs.")
def limit_compare(config: RunConfig) -> Dict[str, Any]:
    spec = config.environment_spec()
    params = scaling_params(config.alpha1, config.alpha2)
    scale, n = config.t_proxy, config.samples
    env = build_environment(spec, scale)
    path_seed = env.horizontal.path.seed

    # Walks at scale T in the fixed environment
    csrw_horizon = walk_horizon(spec, CSRW, scale)
    tasks = [RunTask(spec, VSRW, scale, scale, (CLOCK_POWER,), r, config.jump_cap) for r in range(n)]
    tasks += [RunTask(spec, CSRW, scale, csrw_horizon, (), r, config.jump_cap) for r in range(n)]
    summaries = run_ensemble(run_summary, tasks, config.workers, label="limit-compare walks")
    vsrw = [s for s in summaries[:n] if not s.truncated]
    csrw = [s for s in summaries[n:] if not s.truncated]
    if not vsrw or not csrw:
        raise empty_sample_exception("limit-compare walks")

    items = [(spec.alpha1, spec.mesh, path_seed, scale, r, config.seed) for r in range(n)]
    limits = run_ensemble(_limit_task, items, config.workers, label="limit pairs")

    root_t, root_delta = np.sqrt(scale), scale ** (params.delta / 2.0)
    walk_clock = [s.integrals[CLOCK_POWER] / scale ** params.delta for s in vsrw]
    walk_x1 = [s.final_position[0] / root_delta for s in vsrw]
    walk_x2 = [s.final_position[1] / root_t for s in vsrw]
    csrw_x1 = [s.final_position[0] / np.sqrt(csrw_horizon) for s in csrw]
    csrw_x2 = [s.final_position[1] / root_t for s in csrw]

    checks = [
        _ks_check("clock_ks", walk_clock, [d["delta"] for d in limits], KS_LIMIT, hard=True),
        _ks_check("x1_ks", walk_x1, [d["conv_x1"] for d in limits], KS_LIMIT, hard=True),
        _ks_check("x2_ks", walk_x2, [d["conv_x2"] for d in limits], KS_LIMIT, hard=False),
        _ks_check("csrw_x1_ks", csrw_x1, [d["fin_x1"] for d in limits], KS_LIMIT, hard=False),
        _ks_check("csrw_x2_ks", csrw_x2, [d["fin_x2"] for d in limits], KS_LIMIT, hard=False),
    ]
    increasing = sum(d["delta_increasing"] for d in limits)
    checks.append(Check("delta_strictly_increasing", increasing == n, value=increasing, threshold=n))

    # Self-similarity and route agreement use fresh subordinators per sample
    grid = (0.0, 1.0, 2.0)
    ks_items = [(spec.alpha1, grid, r, config.seed, scale, SRW_ROUTE, spec.mesh, config.bin_width)
                for r in range(2 * n)]
    ks_items += [(spec.alpha1, grid, r, config.seed, scale, BM_ROUTE, spec.mesh, config.bin_width)
                 for r in range(2 * n, 3 * n)]
    ks_values = run_ensemble(_ks_task, ks_items, config.workers, label="Kesten-Spitzer samples")
    srw_at_2 = [v[2] * 2.0 ** -params.delta for v in ks_values[:n]]
    srw_at_1 = [v[1] for v in ks_values[n:2 * n]]
    bm_at_1 = [v[1] for v in ks_values[2 * n:]]
    checks.append(_ks_check("self_similarity_ks", srw_at_2, srw_at_1, SELF_SIMILARITY_LIMIT, hard=True))
    checks.append(_ks_check("route_agreement_ks", bm_at_1, srw_at_1, ROUTE_LIMIT, hard=False))

    rows = []
    for r in range(n):
        row = {"sample": r, **limits[r]}
        for name, summary in (("vsrw", summaries[r]), ("csrw", summaries[n + r])):
            row[f"{name}_x1"], row[f"{name}_x2"] = summary.final_position
            row[f"{name}_truncated"] = summary.truncated
        row["vsrw_clock"] = summaries[r].integrals[CLOCK_POWER] / scale ** params.delta
        rows.append(row)

    first = limit_pair(spec.alpha1, np.linspace(0.0, 1.0, PATH_POINTS + 1), 0, config.seed, scale,
                       spec.mesh, subordinator=env.horizontal.path)
    series = {"Delta(t)": first.clock, "B1(Delta(t))": first.first, "B2(t)": first.second}
    report = {
        "environment": spec.to_dict(),
        "T": scale,
        "delta": params.delta,
        "samples": n,
        "truncated": {"VSRW": n - len(vsrw), "CSRW": n - len(csrw)},
        "csrw_horizon": csrw_horizon,
    }
    artifacts = {
        "limit_compare.csv": rows_csv(rows),
        "limit_pair.csv": path_csv(first.t_grid, delta=first.clock, b1_delta=first.first, b2=first.second),
        "limit_pair.svg": render_paths_svg(first.t_grid, series, title=f"conv pair, alpha={spec.alpha1:g}"),
    }
    return {"report": report, "artifacts": artifacts, "checks": checks}
