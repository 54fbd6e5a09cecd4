"""
Dumps the line rates of an environment around the origin.
"""

import logging
from typing import Any, Dict

from linewalk.core.config import RunConfig
from linewalk.core.export import rows_csv
from linewalk.envgen import STABLE_INCREMENTS, build_environment, dump_window
from linewalk.studies.base import study

logger = logging.getLogger(__name__)


@study(name="dump-env", description="Writes H(k) and V(k) for |k| <= window as CSV.")
def dump_env(config: RunConfig) -> Dict[str, Any]:
    """Stable environments are dumped at scale t_proxy, all others unscaled."""
    spec = config.environment_spec()
    scale = config.t_proxy if spec.h_mode == STABLE_INCREMENTS else 1.0
    env = build_environment(spec, scale)
    rows = [{"k": k, "H": h, "V": v} for k, h, v in dump_window(env, -config.window, config.window + 1)]
    logger.info(f"Dumped {len(rows)} lines (T={scale!r})")
    report = {"environment": spec.to_dict(), "T": scale, "window": config.window}
    return {"report": report, "artifacts": {"environment.csv": rows_csv(rows)}, "checks": []}
