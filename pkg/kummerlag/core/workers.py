"""Worker pool helpers."""

import logging
import os
from typing import Callable, Iterable, List, Optional, Sequence

try:
    joblib = True
    from joblib import Parallel, delayed
except ImportError:
    joblib = False

logger = logging.getLogger(__name__)

THREADS_ENV = "KLL_THREADS"


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Return the number of workers to use.

    The ``KLL_THREADS`` environment variable overrides the argument.
    """
    env = os.environ.get(THREADS_ENV)
    value = env if env else threads
    if value is None:
        return 1
    try:
        n = int(value)
    except (TypeError, ValueError) as err:
        raise ValueError(f"Number of threads must be an integer, got {value!r}") from err
    if n < 1:
        raise ValueError(f"Number of threads must be positive, got {n}")
    return n


def parallel_map(
    func: Callable,
    tasks: Iterable[Sequence],
    threads: int = 1,
) -> List:
    """
    Call ``func(*task)`` for every task and return the results in task order.

    With more than one thread the calls are spread over a joblib pool.
    """
    tasks = list(tasks)
    if threads > 1 and len(tasks) > 1:
        if not joblib:
            raise ImportError(
                "Missing joblib. Please install it to use parallel workers.",
            )
        logger.debug("Dispatching %d tasks to %d workers", len(tasks), threads)
        return Parallel(n_jobs=threads)(delayed(func)(*task) for task in tasks)
    return [func(*task) for task in tasks]
