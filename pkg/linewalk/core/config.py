"""
Run configuration: flat key=value files, environment and flag overrides.

Precedence, lowest first: built-in defaults, the config file, the
LINEWALK_SEED variable (seed only), then command-line overrides.
"""
import logging
import os
from dataclasses import dataclass, asdict, replace
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values

from linewalk.core.errors import configuration_exception, invalid_config_exception
from linewalk.core.rng import DEFAULT_SEED
from linewalk.envgen import DEFAULT_MESH, STABLE_INCREMENTS, EnvironmentSpec, SubordinatorPath
from linewalk.walker import DEFAULT_JUMP_CAP, WalkKind

logger = logging.getLogger(__name__)

SEED_VARIABLE = "LINEWALK_SEED"
FORMATS = ("csv", "json", "svg", "bin")
CHECKS = (
    "diffineq", "identities", "max_bound", "lt_moment", "dclock", "stable_law",
    "ratio", "qv", "overscaling", "ergodic", "xstar_moments",
)
# A blank list value means an empty list, not the default
LIST_KEYS = ("t_grid", "alpha_grid", "checks", "formats")
# Where and how fast a run executes, never what it computes
RUN_CONTROL_KEYS = ("workers", "out")


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; validated before any simulation."""
    command: str = "figure1"
    # environment
    alpha1: float = 0.6
    alpha2: float = 0.9
    h_mode: str = "pareto_floor"
    v_mode: str = "pareto_floor"
    h_floor: float = 1.0
    v_floor: Optional[float] = None
    v_mean: float = 1.0
    h_coupling: str = "quenched"
    mesh: float = DEFAULT_MESH
    # walk
    walk_kind: str = "VSRW"
    alpha1_minus: Optional[float] = None
    alpha2_minus: Optional[float] = None
    jump_cap: int = DEFAULT_JUMP_CAP
    # study sizes
    t_grid: Tuple[float, ...] = (2.0 ** 8, 2.0 ** 10, 2.0 ** 12, 2.0 ** 14, 2.0 ** 16)
    runs: int = 500
    samples: int = 1000
    t_proxy: float = 2.0 ** 14
    bin_width: float = 2.0 ** -6
    a1: Optional[float] = None
    a2: Optional[float] = None
    alpha_grid: Tuple[float, ...] = (0.3, 0.6, 0.9)
    probe_time: float = 1.0
    probes: int = 100
    figure_jumps: int = 100
    checks: Tuple[str, ...] = CHECKS
    window: int = 64
    # run control
    seed: int = DEFAULT_SEED
    workers: int = 1
    out: str = "out"
    formats: Tuple[str, ...] = ("csv", "json", "svg")

    def environment_spec(self, **changes) -> EnvironmentSpec:
        spec = EnvironmentSpec(
            alpha1=self.alpha1, alpha2=self.alpha2, h_mode=self.h_mode, v_mode=self.v_mode,
            h_floor=self.h_floor, v_floor=self.v_floor, v_mean=self.v_mean, seed=self.seed,
            h_coupling=self.h_coupling, mesh=self.mesh,
        )
        return replace(spec, **changes) if changes else spec

    def walk(self) -> WalkKind:
        return WalkKind(self.walk_kind, self.alpha1_minus, self.alpha2_minus)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}

    def report_dict(self) -> Dict[str, Any]:
        """The config as embedded in reports; run-control keys that never change a result are left out."""
        return {k: v for k, v in self.to_dict().items() if k not in RUN_CONTROL_KEYS}


# --- Value parsers ---

def parse_number(token: str) -> float:
    """A float, or a power written b^k (e.g. 2^-8)."""
    token = token.strip()
    if "^" in token:
        base, exponent = token.split("^", 1)
        return float(base) ** float(exponent)
    return float(token)


def _parse_int(token: str) -> int:
    value = parse_number(token)
    if value != int(value):
        raise ValueError(f"{token!r} is not an integer")
    return int(value)


def _parse_optional_float(token: str) -> Optional[float]:
    return None if token.strip().lower() in ("", "none") else parse_number(token)


def _parse_float_list(token: str) -> Tuple[float, ...]:
    return tuple(parse_number(t) for t in token.split(",") if t.strip())


def _parse_str_list(token: str) -> Tuple[str, ...]:
    return tuple(t.strip() for t in token.split(",") if t.strip())


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "command": str.strip,
    "alpha1": parse_number,
    "alpha2": parse_number,
    "h_mode": str.strip,
    "v_mode": str.strip,
    "h_floor": parse_number,
    "v_floor": _parse_optional_float,
    "v_mean": parse_number,
    "h_coupling": str.strip,
    "mesh": parse_number,
    "walk_kind": lambda s: s.strip().upper(),
    "alpha1_minus": _parse_optional_float,
    "alpha2_minus": _parse_optional_float,
    "jump_cap": _parse_int,
    "t_grid": _parse_float_list,
    "runs": _parse_int,
    "samples": _parse_int,
    "t_proxy": parse_number,
    "bin_width": parse_number,
    "a1": _parse_optional_float,
    "a2": _parse_optional_float,
    "alpha_grid": _parse_float_list,
    "probe_time": parse_number,
    "probes": _parse_int,
    "figure_jumps": _parse_int,
    "checks": _parse_str_list,
    "window": _parse_int,
    "seed": _parse_int,
    "workers": _parse_int,
    "out": str.strip,
    "formats": lambda s: tuple(f.lower() for f in _parse_str_list(s)),
}


def _apply(values: Dict[str, Any], raw: Mapping[str, Optional[str]], source: str) -> None:
    for key, text in raw.items():
        key = key.strip().lower()
        if key not in _PARSERS:
            raise invalid_config_exception(key, f"unknown key (from {source})")
        if text is None or not str(text).strip():
            if key not in LIST_KEYS:
                continue
            text = ""
        try:
            values[key] = _PARSERS[key](str(text))
        except (ValueError, TypeError) as e:
            raise invalid_config_exception(key, f"cannot parse {text!r} ({e})")


def load_config(command: str, path: Optional[str] = None, overrides: Optional[Mapping[str, str]] = None,
                environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Builds and validates the RunConfig for `command`.

    Args:
        command: The CLI command the config is for.
        path: Optional key=value file.
        overrides: Flag values as strings, applied last.
        environ: Environment mapping (defaults to os.environ); only LINEWALK_SEED is read.
    """
    environ = os.environ if environ is None else environ
    values: Dict[str, Any] = {}
    if path is not None:
        if not os.path.isfile(path):
            raise configuration_exception(f"Config file '{path}' does not exist.")
        _apply(values, dotenv_values(path), path)
        logger.info(f"Loaded config file {path}")
    if environ.get(SEED_VARIABLE):
        _apply(values, {"seed": environ[SEED_VARIABLE]}, SEED_VARIABLE)
    if overrides:
        _apply(values, overrides, "command line")
    values["command"] = command

    config = RunConfig(**values)
    validate(config)
    return config


def validate(config: RunConfig) -> None:
    """Domain checks that do not need a simulation."""
    config.environment_spec()
    walk = config.walk()
    walk.check_against(config.environment_spec())

    for name in ("runs", "samples", "probes", "figure_jumps", "window", "jump_cap"):
        if getattr(config, name) < 1:
            raise invalid_config_exception(name, "must be >= 1")
    if config.workers < 0:
        raise invalid_config_exception("workers", "must be >= 0 (0 uses all cores but one)")
    for name in ("t_proxy", "bin_width", "probe_time"):
        if not getattr(config, name) > 0:
            raise invalid_config_exception(name, "must be > 0")
    if any(t < 1 for t in config.t_grid):
        raise invalid_config_exception("t_grid", "every scale must be >= 1")
    if any(not a > 0 for a in config.alpha_grid):
        raise invalid_config_exception("alpha_grid", "every alpha must be > 0")
    unknown = set(config.formats) - set(FORMATS)
    if unknown:
        raise invalid_config_exception("formats", f"unsupported {sorted(unknown)}; choose from {FORMATS}")
    unknown = set(config.checks) - set(CHECKS)
    if unknown:
        raise invalid_config_exception("checks", f"unknown checks {sorted(unknown)}; choose from {CHECKS}")

    if config.command in ("scaling", "conjecture") and len(config.t_grid) == 0:
        raise invalid_config_exception("t_grid", "is empty; give at least two scales")
    if config.command in ("scaling", "conjecture") and len(config.t_grid) < 2:
        raise invalid_config_exception("t_grid", "needs at least two scales for a fit")
    if config.command == "limit-compare":
        if config.h_mode != STABLE_INCREMENTS:
            raise invalid_config_exception("h_mode", "limit-compare needs h_mode=stable_increments")
        if not 0 < config.alpha1 < 1:
            raise invalid_config_exception("alpha1", "limit-compare needs 0 < alpha1 < 1")

    # Stable mode only admits scales with 1/sqrt(T) on the mesh
    if config.h_mode == STABLE_INCREMENTS:
        path = SubordinatorPath(config.alpha1, config.mesh, config.seed)
        scales = {"scaling": config.t_grid, "conjecture": config.t_grid, "limit-compare": (config.t_proxy,)}
        for scale in scales.get(config.command, ()):
            path.cells_per_site(scale)
