"""Bounded thread fan-out for independent numerical tasks.

Every task runs in a worker thread via asyncio.to_thread; a semaphore caps
how many run at once. Results come back in input order.
"""

from __future__ import annotations

import asyncio
import logging
from typing import Callable, Sequence, TypeVar

from melcert.config import resolve_threads

logger = logging.getLogger(__name__)

T = TypeVar("T")


async def _run_task(name: str, fn: Callable[[], T], gate: asyncio.Semaphore) -> T:
    """Run one task in a worker thread, logging failures before re-raising."""
    async with gate:
        try:
            return await asyncio.to_thread(fn)
        except Exception as exc:
            logger.error("Task '%s' failed: %s", name, exc)
            raise


async def gather_tasks(
    tasks: Sequence[tuple[str, Callable[[], T]]],
    threads: int | None = None,
) -> list[T]:
    gate = asyncio.Semaphore(resolve_threads(threads))
    return await asyncio.gather(*(_run_task(name, fn, gate) for name, fn in tasks))


def run_parallel(tasks: Sequence[tuple[str, Callable[[], T]]], threads: int | None = None) -> list[T]:
    """Synchronous entry point: run `(name, fn)` pairs concurrently."""
    if not tasks:
        return []
    if resolve_threads(threads) == 1:
        return [fn() for _, fn in tasks]
    return asyncio.run(gather_tasks(tasks, threads))
