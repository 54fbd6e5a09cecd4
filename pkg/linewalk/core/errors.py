"""Standardized error handling for linewalk."""

import logging
from typing import Any, Dict, Iterable, Optional

logger = logging.getLogger(__name__)

# --- Exit Codes ---
EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class LinewalkException(Exception):
    """Custom exception for linewalk-specific errors."""
    def __init__(
        self,
        code: str,
        message: str,
        remedy: Optional[str] = None,
        exit_code: int = EXIT_USAGE,
        context: Optional[Dict[str, Any]] = None,
    ):
        self.code = code
        self.message = message
        self.remedy = remedy
        self.exit_code = exit_code
        self.context = context or {}
        detail = {
            "error": {
                "code": self.code,
                "message": self.message,
            }
        }
        if self.remedy:
            detail["error"]["remedy"] = self.remedy
        self.detail = detail
        super().__init__(message)


def linewalk_exception_handler(exc: LinewalkException) -> int:
    """Logs a LinewalkException and returns the process exit code for it."""
    error = exc.detail["error"]
    logger.error(f"{error['code']}: {error['message']}")
    if exc.remedy:
        logger.error(f"Remedy: {exc.remedy}")
    return exc.exit_code


# --- Pre-defined Exceptions ---

def domain_exception(parameter: str, value: Any, constraint: str):
    return LinewalkException(
        code="domain_error",
        message=f"Parameter '{parameter}'={value!r} violates {constraint}.",
        context={"parameter": parameter, "value": value},
    )

def configuration_exception(detail: str, remedy: Optional[str] = None):
    return LinewalkException(
        code="configuration_error",
        message=detail,
        remedy=remedy,
    )

def inadmissible_scale_exception(scale: float, mesh: float, nearest: Iterable[float] = ()):
    nearest = [float(n) for n in nearest]
    remedy = "Snap T so that 1/sqrt(T) is an integer multiple of the mesh"
    if nearest:
        remedy += f", e.g. T in {nearest}"
    return LinewalkException(
        code="inadmissible_scale",
        message=f"Scale T={scale!r} is not admissible for mesh {mesh!r}.",
        remedy=remedy + ".",
        context={"scale": scale, "mesh": mesh},
    )

def clock_range_exception(value: float, attained: float):
    return LinewalkException(
        code="clock_out_of_range",
        message=f"Clock value {value!r} lies outside the attained range [0, {attained!r}].",
        remedy="Simulate to a longer horizon or request a smaller value.",
        context={"value": value, "attained": attained},
    )

def horizon_exception(requested: float, attained: float):
    return LinewalkException(
        code="horizon_not_reached",
        message=f"Trajectory valid up to {attained!r}, but time {requested!r} was requested.",
        remedy="Raise the jump cap or lower the time horizon.",
        context={"requested": requested, "attained": attained},
    )

def clock_mismatch_exception(knots: int, jumps: int):
    return LinewalkException(
        code="clock_mismatch",
        message=f"Clock has {knots} knots but the trajectory has {jumps} jumps (expected {jumps + 1} knots).",
        remedy="Build the clock from the same trajectory with additive_functional().",
    )

def supercritical_exception(eps_product: float):
    return LinewalkException(
        code="supercritical",
        message=f"Scaling exponents are undefined: eps1*eps2={eps_product!r} >= 1.",
        remedy="Choose exponents with eps1*eps2 < 1 (the non-explosion regime).",
    )

def empty_sample_exception(name: str):
    return LinewalkException(
        code="empty_sample",
        message=f"Sample '{name}' is empty.",
    )

def unstable_integration_exception(step: float, detail: str):
    return LinewalkException(
        code="unstable_integration",
        message=f"Integration with step {step!r} is unstable: {detail}.",
        remedy="Reduce the integration step.",
        exit_code=EXIT_CHECK_FAILED,
    )

def fit_refused_exception(exclusion_rate: float, limit: float):
    return LinewalkException(
        code="fit_refused",
        message=f"Exponent fit refused: {exclusion_rate:.1%} of runs were truncated (limit {limit:.0%}).",
        remedy="Raise jump_cap or lower the largest T.",
        exit_code=EXIT_CHECK_FAILED,
    )

def invalid_config_exception(key: str, reason: str):
    return LinewalkException(
        code="invalid_config",
        message=f"Invalid configuration key '{key}': {reason}",
        remedy="Check the key against the recognised keys in configs/default.env.",
        context={"key": key},
    )

def unknown_command_exception(command: str, known: Iterable[str]):
    return LinewalkException(
        code="unknown_command",
        message=f"Unknown command '{command}'.",
        remedy=f"Valid commands are {', '.join(sorted(known))}.",
    )

def artifact_io_exception(path: str, error: str):
    return LinewalkException(
        code="artifact_io_error",
        message=f"Could not write artifact '{path}': {error}",
        exit_code=EXIT_IO,
        context={"path": path},
    )

def study_execution_exception(study_name: str, error: str):
    return LinewalkException(
        code="study_execution_failed",
        message=f"Study '{study_name}' failed to execute: {error}",
        exit_code=EXIT_CHECK_FAILED,
    )
