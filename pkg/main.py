import os
import sys
import asyncio
import logging
import argparse
from typing import Any, Dict, List, Optional, Sequence

from dotenv import load_dotenv

from linewalk import __version__
from linewalk.core.config import load_config
from linewalk.core.errors import (
    EXIT_IO,
    LinewalkException,
    invalid_config_exception,
    linewalk_exception_handler,
)
from linewalk.core.export import report_json
from linewalk.core.storage_service import ArtifactStore
from linewalk.studies.study_registry import get_global_registry

# --- Load Environment Variables ---
load_dotenv()

# --- Basic Logging Setup ---
LOG_LEVEL = os.getenv("LINEWALK_LOG_LEVEL", "INFO").upper()
logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logger = logging.getLogger(__name__)

# --- Configuration ---
REPORT_NAME = "report.json"
EXTENSION_FORMATS = {".csv": "csv", ".json": "json", ".svg": "svg", ".bin": "bin"}


# --- Argument Parsing ---
def build_parser(commands: Sequence[str]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--seed", help="base seed (overrides LINEWALK_SEED and the config file)")
    common.add_argument("--workers", help="worker processes; 0 uses all cores but one")
    common.add_argument("--out", help="output directory or gs://bucket/prefix")
    common.add_argument("--format", dest="formats", help="comma-separated subset of csv,json,svg,bin")
    common.add_argument("--set", dest="assignments", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key; may be repeated")

    parser = argparse.ArgumentParser(prog="linewalk", description="Random walks on random lines of Z^2.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    registry = get_global_registry()
    for name in commands:
        sub.add_parser(name, parents=[common], help=registry.get_study(name).description)
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, str]:
    """Flag values as config overrides; explicit flags win over --set."""
    overrides: Dict[str, str] = {}
    for assignment in args.assignments:
        key, sep, value = assignment.partition("=")
        if not sep or not key.strip():
            raise invalid_config_exception(assignment, "expected KEY=VALUE")
        overrides[key.strip()] = value
    for key in ("seed", "workers", "out", "formats"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return overrides


def artifact_format(filename: str) -> Optional[str]:
    return EXTENSION_FORMATS.get(os.path.splitext(filename)[1].lower())


# --- Output ---
async def write_outputs(store: ArtifactStore, report: Dict[str, Any], artifacts: Dict[str, Any],
                        formats: Sequence[str]) -> List[str]:
    """Writes the artifacts whose format was requested, then the JSON report."""
    written = []
    for filename, content in artifacts.items():
        if artifact_format(filename) in formats:
            written.append(await store.save_file(content, filename))
    if "json" in formats:
        written.append(await store.save_file(report_json(report), REPORT_NAME))
    return written


# --- Entry Point ---
async def run(argv: Optional[Sequence[str]] = None) -> int:
    registry = get_global_registry()
    parser = build_parser(registry.names())
    args = parser.parse_args(argv)

    try:
        config = load_config(args.command, args.config, collect_overrides(args))
        study = registry.get_study(args.command)
        store = ArtifactStore(config.out)
        result = await study.execute(config)

        if not result.success:
            logger.error(f"{args.command} failed: {result.error}")
            report = {"command": args.command, "seed": config.seed, **result.metadata.get("detail", {})}
            if "json" in config.formats:
                await store.save_file(report_json(report), REPORT_NAME)
            return result.exit_code

        written = await write_outputs(store, result.data["report"], result.data["artifacts"], config.formats)
        for check in result.data["checks"]:
            level = logging.INFO if check["passed"] else logging.WARNING
            logger.log(level, f"check {check['name']}: {'pass' if check['passed'] else 'FAIL'}"
                              f"{'' if check['hard'] else ' (soft)'} value={check['value']!r}")
        stored = await store.list_files()
        logger.info(f"{args.command} finished: wrote {len(written)} files; {config.out} now holds "
                    f"{len(stored)} files, {sum(item['size'] for item in stored)} bytes")
        return result.exit_code
    except LinewalkException as e:
        return linewalk_exception_handler(e)
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        return EXIT_IO


def main(argv: Optional[Sequence[str]] = None) -> int:
    return asyncio.run(run(argv))


if __name__ == "__main__":
    sys.exit(main())
