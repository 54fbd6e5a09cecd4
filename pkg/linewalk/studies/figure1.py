"""
This study renders a single short trajectory in the default environment.
"""

import logging
from typing import Any, Dict

from linewalk.core.config import RunConfig
from linewalk.core.export import trajectory_binary, trajectory_csv
from linewalk.core.rendering import render_trajectory_svg
from linewalk.envgen import build_environment
from linewalk.studies.base import Check, study
from linewalk.walker import simulate

logger = logging.getLogger(__name__)


@study(name="figure1", description="Simulates one walk for a fixed number of jumps and draws its path.")
def figure1(config: RunConfig) -> Dict[str, Any]:
    """
    Simulates a trajectory of `figure_jumps` jumps from the origin.

    Args:
        config: The validated run configuration.

    Returns:
        Report, trajectory artifacts (csv, svg, bin) and checks.
    """
    spec = config.environment_spec()
    env = build_environment(spec)
    kind = config.walk()
    traj = simulate(env, kind, max_jumps=config.figure_jumps, stream=0, jump_cap=config.jump_cap)

    x1, x2 = (int(v) for v in traj.positions[-1])
    report = {
        "environment": spec.to_dict(),
        "walk": kind.tag,
        "jumps": traj.n_jumps,
        "final_position": [x1, x2],
        "elapsed": float(traj.jump_times[-1]) if traj.n_jumps else 0.0,
        "extent": {
            "x1": [int(traj.positions[:, 0].min()), int(traj.positions[:, 0].max())],
            "x2": [int(traj.positions[:, 1].min()), int(traj.positions[:, 1].max())],
        },
    }
    title = f"{kind.tag}, alpha=({spec.alpha1:g}, {spec.alpha2:g}), {traj.n_jumps} jumps"
    artifacts = {
        "trajectory.csv": trajectory_csv(traj),
        "trajectory.svg": render_trajectory_svg(traj, title),
        "trajectory.bin": trajectory_binary(traj),
    }
    checks = [
        Check("jump_budget", traj.n_jumps == config.figure_jumps, value=traj.n_jumps, threshold=config.figure_jumps),
        Check("nearest_neighbour_steps", traj.is_nearest_neighbour()),
    ]
    return {"report": report, "artifacts": artifacts, "checks": checks}
