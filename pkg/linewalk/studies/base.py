"""Base study interface for linewalk commands."""

import asyncio
import inspect
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from linewalk.core.config import RunConfig
from linewalk.core.errors import EXIT_CHECK_FAILED, EXIT_PASS, LinewalkException, study_execution_exception

logger = logging.getLogger(__name__)


@dataclass
class Check:
    """One pass/fail line of a report; only hard checks set the exit code."""
    name: str
    passed: bool
    hard: bool = True
    value: Any = None
    threshold: Any = None

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": bool(self.passed), "hard": self.hard,
                "value": self.value, "threshold": self.threshold}


@dataclass
class StudyResult:
    """Result from study execution."""
    success: bool
    data: Any
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        if "exit_code" in self.metadata:
            return self.metadata["exit_code"]
        checks = (self.data or {}).get("checks", [])
        failed = [c for c in checks if c["hard"] and not c["passed"]]
        return EXIT_CHECK_FAILED if failed else EXIT_PASS


class BaseStudy(ABC):
    """Abstract base class for studies."""

    def __init__(self, name: Optional[str] = None, description: Optional[str] = None):
        self.name = name or self.__class__.__name__
        self.description = description or (self.__doc__ or "").strip()

    @abstractmethod
    async def execute(self, config: RunConfig) -> StudyResult:
        """Runs the study for a validated config."""


class FunctionStudy(BaseStudy):
    """Wraps a function `config -> {'report', 'artifacts', 'checks'}` into a study.

    Synchronous functions run in a worker thread so the event loop stays free
    for artifact I/O.
    """

    def __init__(self, func: Callable, name: Optional[str] = None, description: Optional[str] = None):
        self.func = func
        self.is_async = inspect.iscoroutinefunction(func)
        super().__init__(
            name=name or func.__name__,
            description=description or (func.__doc__ or "").strip().split("\n")[0],
        )

    async def execute(self, config: RunConfig) -> StudyResult:
        logger.info(f"Running study '{self.name}' (seed {config.seed}, workers {config.workers})")
        try:
            if self.is_async:
                output = await self.func(config)
            else:
                output = await asyncio.to_thread(self.func, config)
        except LinewalkException as e:
            return StudyResult(False, None, e.message, {"exit_code": e.exit_code, "detail": e.detail})
        except Exception as e:
            logger.error(f"Study '{self.name}' raised: {e}", exc_info=True)
            wrapped = study_execution_exception(self.name, str(e))
            return StudyResult(False, None, wrapped.message, {"exit_code": wrapped.exit_code, "detail": wrapped.detail})

        checks: List[Dict[str, Any]] = [c.to_dict() if isinstance(c, Check) else c for c in output.get("checks", [])]
        report = dict(output.get("report", {}))
        report["config"] = config.report_dict()
        report["seed"] = config.seed
        report["checks"] = checks
        data = {"report": report, "artifacts": output.get("artifacts", {}), "checks": checks}
        return StudyResult(True, data)


class DualUseStudy(FunctionStudy):
    """A study that can also be called directly with a config."""

    def __call__(self, config: RunConfig):
        return self.func(config)


def study(name: Optional[str] = None, description: Optional[str] = None):
    """Decorator turning a function into a registered-able study.

    Example:
        @study(name="figure1", description="Render a 100-jump trajectory")
        def figure1(config: RunConfig) -> dict:
            ...

        result = await figure1.execute(config)   # StudyResult
        output = figure1(config)                 # plain dict
    """
    def decorator(func: Callable) -> DualUseStudy:
        return DualUseStudy(func, name=name, description=description)

    return decorator
