"""
Deterministic ensemble runner.

Work items are mapped through a module-level function either inline or on a
process pool. Results always come back in item order, so any reduction over
them is independent of the worker count.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Below this many items a pool costs more than it saves
INLINE_THRESHOLD = 8


def resolve_workers(workers: Optional[int]) -> int:
    if workers is None or workers <= 0:
        return max(1, (os.cpu_count() or 2) - 1)
    return workers


def run_ensemble(func: Callable[[T], R], items: Sequence[T], workers: Optional[int] = 1,
                 label: str = "ensemble") -> List[R]:
    """Applies `func` to every item and returns the results in item order.

    Args:
        func: A picklable module-level function.
        items: Work items; each must be picklable.
        workers: Process count; 1 runs inline, None or 0 uses all cores but one.
        label: Name used in progress logs.
    """
    items = list(items)
    workers = resolve_workers(workers)
    if workers == 1 or len(items) < INLINE_THRESHOLD:
        logger.debug(f"{label}: {len(items)} items inline")
        return [func(item) for item in items]

    chunksize = max(1, len(items) // (4 * workers))
    logger.info(f"{label}: {len(items)} items on {workers} workers (chunksize {chunksize})")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
