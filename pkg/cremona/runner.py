from __future__ import annotations

import asyncio
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional, TypeVar

__all__ = ("JobRunner",)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class JobRunner:
    """
    Runs independent jobs (n values, roots, grid rows) on a thread pool.

    Attributes:
        threads (int): The number of jobs allowed to run at once.
        executor (concurrent.futures.ThreadPoolExecutor): The pool jobs run on.

    Example:
        ```py
        async with JobRunner(4) as runner:
            findings = await runner.map(lambda n: find_period_steps(wp, [1, 2], n), range(2, 11))
        ```

    """

    def __init__(self, threads: int = 1, *, loop: Optional[asyncio.AbstractEventLoop] = None) -> None:
        """
        Parameters:
            threads (int): The number of worker threads, at least one.
            loop (Optional[asyncio.AbstractEventLoop]): The loop to schedule on; the running one by default.

        """
        self.threads: int = max(1, int(threads))
        self.executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="cremona")
        self._loop = loop
        self._semaphore: Optional[asyncio.Semaphore] = None

    def __repr__(self) -> str:
        return f"<JobRunner threads={self.threads}>"

    async def __aenter__(self) -> JobRunner:
        return self

    async def __aexit__(self, *exc: Any) -> None:
        self.close()

    @property
    def loop(self) -> asyncio.AbstractEventLoop:
        return self._loop or asyncio.get_running_loop()

    @property
    def semaphore(self) -> asyncio.Semaphore:
        if self._semaphore is None:
            self._semaphore = asyncio.Semaphore(self.threads)

        return self._semaphore

    async def run(self, func: Callable[..., R], *args: Any, **kwargs: Any) -> R:
        """
        Runs one job in the pool.

        Parameters:
            func (Callable[..., R]): The job.
            *args (Any): Positional arguments for the job.
            **kwargs (Any): Keyword arguments for the job.

        Returns:
            The result of the job.

        """
        async with self.semaphore:
            return await self.loop.run_in_executor(self.executor, functools.partial(func, *args, **kwargs))

    async def map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Runs a job per item; results come back in the order of `items` whatever the thread count.

        Raises:
            The exception of the first failing job, in item order.

        """
        items = list(items)
        logger.debug(f"JOBS SUBMITTED: {len(items)} on {self.threads} threads")

        results = await asyncio.gather(*(self.run(func, item) for item in items), return_exceptions=True)
        for result in results:
            if isinstance(result, BaseException):
                raise result

        return list(results)

    def close(self) -> None:
        self.executor.shutdown(wait=True)
