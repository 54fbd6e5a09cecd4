"""
Side-by-side VSRW and CSRW exponent fits with the conjectured exponents.
"""

import logging
from typing import Any, Dict

from linewalk.core.config import RunConfig
from linewalk.core.export import rows_csv
from linewalk.experiments import conjecture_explorer
from linewalk.studies.base import Check, study

logger = logging.getLogger(__name__)


@study(name="conjecture", description="Reports fitted VSRW and CSRW exponents next to the conjectured ones.")
def conjecture(config: RunConfig) -> Dict[str, Any]:
    spec = config.environment_spec()
    report = conjecture_explorer(spec, config.t_grid, config.runs, config.workers, config.jump_cap)
    report["environment"] = spec.to_dict()

    rows = []
    checks = []
    for kind in ("VSRW", "CSRW"):
        for name in ("x1", "x2"):
            fit = report[kind]["fits"][name]
            target = report[kind]["targets"][name]
            rows.append({"walk": kind, "component": name, "slope": fit["slope"], "stderr": fit["stderr"],
                         "target": target, "reportable": fit["reportable"]})
            if target is not None:
                # Never sets the exit code
                checks.append(Check(f"{kind.lower()}_{name}_within_two_stderr",
                                    abs(fit["slope"] - target) <= 2.0 * fit["stderr"], hard=False,
                                    value=fit["slope"], threshold=target))
    return {"report": report, "artifacts": {"conjecture.csv": rows_csv(rows)}, "checks": checks}
