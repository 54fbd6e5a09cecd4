"""Study discovery and registry."""

import importlib
import inspect
import logging
from pathlib import Path
from typing import Dict, List, Optional

from linewalk.core.errors import unknown_command_exception
from linewalk.studies.base import BaseStudy

logger = logging.getLogger(__name__)

STUDY_DIR = Path(__file__).resolve().parent
SKIPPED = ("__init__.py", "base.py", "study_registry.py")


class StudyError(Exception):
    pass


class StudyRegistry:
    """Registry for discovering and managing studies."""

    def __init__(self):
        self.studies: Dict[str, BaseStudy] = {}

    def register(self, study_obj: BaseStudy, override: bool = False) -> None:
        if not isinstance(study_obj, BaseStudy):
            raise StudyError(f"Invalid study type: {type(study_obj)}")
        if not study_obj.name or not study_obj.description:
            raise StudyError("Study must have a name and a description.")
        if study_obj.name in self.studies and not override:
            raise StudyError(f"Study '{study_obj.name}' already registered.")
        self.studies[study_obj.name] = study_obj
        logger.debug(f"Registered study: {study_obj.name}")

    def discover_studies(self, path: Optional[Path] = None) -> List[str]:
        """Imports every study module under `path` and registers its studies."""
        path = Path(path or STUDY_DIR)
        found = []
        for py_file in sorted(path.glob("*.py")):
            if py_file.name in SKIPPED or py_file.name.startswith("test_"):
                continue
            module = importlib.import_module(f"linewalk.studies.{py_file.stem}")
            for _, obj in inspect.getmembers(module):
                if isinstance(obj, BaseStudy) and obj.name not in self.studies:
                    self.register(obj)
                    found.append(obj.name)
        logger.debug(f"Discovered {len(found)} studies in {path}")
        return found

    def get_study(self, name: str) -> BaseStudy:
        if name not in self.studies:
            raise unknown_command_exception(name, self.studies)
        return self.studies[name]

    def names(self) -> List[str]:
        return sorted(self.studies)


_global_registry: Optional[StudyRegistry] = None


def get_global_registry() -> StudyRegistry:
    """The process-wide registry, populated on first use."""
    global _global_registry
    if _global_registry is None:
        _global_registry = StudyRegistry()
        _global_registry.discover_studies()
    return _global_registry
