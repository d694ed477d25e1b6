"""Util module."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import psutil

from phibv.configuration import config

log = logging.getLogger("phibv")

T = TypeVar("T")
R = TypeVar("R")


def get_thread_count(threads: Optional[int] = None) -> int:
    """Return the number of worker threads.

    Parameters
    ----------
    threads : Optional[int]
        Explicit request. ``None`` or 0 falls back to ``[numerics] threads``,
        then to the number of physical cores.

    Returns
    -------
    int
        Thread count, at least 1 and at most ``PHIBV_THREADS`` when set.
    """
    if not threads:
        threads = config.getint("numerics", "threads")
    if not threads:
        threads = psutil.cpu_count(logical=False) or 1
    if "PHIBV_THREADS" in os.environ:
        try:
            threads = min(threads, int(os.environ["PHIBV_THREADS"]))
        except ValueError:
            log.warning(f"Ignoring invalid PHIBV_THREADS {os.environ['PHIBV_THREADS']}")
    return max(int(threads), 1)


def parallel_map(
    func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Map ``func`` over ``items`` on a thread pool, keeping the input order."""
    items = list(items)
    workers = min(get_thread_count(threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def best_index(values: Sequence[float]) -> Tuple[int, float]:
    """Index and value of the maximum, lowest index on ties, nan ignored."""
    array = np.asarray(values, dtype=float)
    array = np.where(np.isnan(array), -np.inf, array)
    index = int(np.argmax(array))
    return index, float(array[index])
