"""Order-preserving map over a process pool."""

import logging
import multiprocessing
from collections.abc import Callable, Sequence
from typing import TypeVar

_LOGGER = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Apply func to every item, results in input order.

    With jobs > 1 the items are distributed over a process pool; func and the
    items must be picklable. Results do not depend on the number of jobs.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    processes = min(jobs, len(items))
    _LOGGER.info("processing %d items with %d processes", len(items), processes)
    with multiprocessing.Pool(processes) as pool:
        return pool.map(func, items)
