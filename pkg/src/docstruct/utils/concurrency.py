"""
Document-level work pool.
"""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_documents(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order.

    With ``threads <= 1`` the work runs inline. The first exception raised by
    a worker propagates to the caller.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    workers = min(threads, len(items))
    logger.debug("Processing %d items on %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="docstruct") as pool:
        return list(pool.map(fn, items))


__all__ = ["map_documents"]
